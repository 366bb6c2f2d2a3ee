#include "bikeshare/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bikeshare/dynamics.hpp"
#include "bikeshare/rates.hpp"
#include "bikeshare/rng.hpp"

namespace bikeshare {

namespace {

constexpr double kUniformLoadTol = 1e-13;

bool near_unit_load(const RatePair& rates) {
    return std::abs(rates.birth - rates.death) < kUniformLoadTol * (rates.birth + rates.death);
}

// Truncated geometric law from log(rho). Written in terms of the ratio that is
// below one so that rho^(K+1) never overflows.
std::vector<double> law_from_log(double log_rho, int K) {
    std::vector<double> p(K + 1);
    if (log_rho == 0.0) {
        std::fill(p.begin(), p.end(), 1.0 / (K + 1));
        return p;
    }
    const double s = -std::abs(log_rho);
    const double head = std::expm1(s) / std::expm1(static_cast<double>(K + 1) * s);
    for (int k = 0; k <= K; ++k) {
        const int power = log_rho < 0.0 ? k : K - k;
        p[k] = std::exp(static_cast<double>(power) * s) * head;
    }
    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v /= sum;
    return p;
}

std::vector<double> point_mass_at_zero(int K) {
    std::vector<double> p(K + 1, 0.0);
    p[0] = 1.0;
    return p;
}

double horner_power_sum(double x, int K) {
    double s = 0.0;
    for (int k = 0; k <= K; ++k) s = s * x + 1.0;
    return s;
}

double upper_load(const SystemParams& params) {
    return params.mu * params.capacity_c / (params.delta * params.lambda);
}

struct Bracket {
    double lo, hi, d_lo, d_hi;
};

std::string describe_bracket(double lo, double d_lo, double hi, double d_hi) {
    std::ostringstream os;
    os.precision(10);
    os << "load defect does not change sign: D(" << lo << ") = " << d_lo << ", D(" << hi << ") = " << d_hi;
    return os.str();
}

FixedPointResult finish(const SystemParams& params, double rho, int iterations) {
    FixedPointResult res;
    res.rho = rho;
    res.p = geometric_law(rho, params.capacity_k);
    res.rates = limiting_rates(res.p, params);
    res.residual = stationary_residual(res.p, params);
    res.iterations = iterations;
    return res;
}

void check_assumption(const FixedPointResult& res, const SystemParams& params) {
    const double limit = 1.0 - params.delta;
    if (res.p.front() > limit || res.p.back() > limit) {
        std::ostringstream os;
        os.precision(10);
        os << "fixed point lies outside the problematic-station domain: p0 = " << res.p.front()
           << ", pK = " << res.p.back() << ", 1 - delta = " << limit;
        throw AssumptionViolationError(os.str());
    }
}

// Bisection down to a narrow bracket, then safeguarded secant steps.
FixedPointResult refine(const SystemParams& params, Bracket br, double tol, int evaluations) {
    const SolverOptions opts;
    auto converged = [&](double rho) { return stationary_residual(geometric_law(rho, params.capacity_k), params) < tol; };

    while (br.hi - br.lo > 1e-3 * std::max(br.hi, 1e-300) && evaluations < opts.max_iterations) {
        const double mid = 0.5 * (br.lo + br.hi);
        const double d = load_defect(mid, params);
        ++evaluations;
        if (d == 0.0) return finish(params, mid, evaluations);
        if (d > 0.0) {
            br.lo = mid;
            br.d_lo = d;
        } else {
            br.hi = mid;
            br.d_hi = d;
        }
    }

    double x0 = br.lo, f0 = br.d_lo, x1 = br.hi, f1 = br.d_hi;
    double best = std::abs(br.d_lo) < std::abs(br.d_hi) ? br.lo : br.hi;
    while (evaluations < opts.max_iterations) {
        if (converged(best)) return finish(params, best, evaluations);
        if (br.hi - br.lo <= 4.0 * std::numeric_limits<double>::epsilon() * br.hi) break;

        double x = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x > br.lo && x < br.hi) || !std::isfinite(x)) x = 0.5 * (br.lo + br.hi);
        const double f = load_defect(x, params);
        ++evaluations;
        if (f == 0.0) return finish(params, x, evaluations);
        if (f > 0.0) {
            br.lo = x;
            br.d_lo = f;
        } else {
            br.hi = x;
            br.d_hi = f;
        }
        x0 = x1;
        f0 = f1;
        x1 = x;
        f1 = f;
        best = x;
    }

    FixedPointResult res = finish(params, best, evaluations);
    if (!(res.residual < tol)) {
        std::ostringstream os;
        os << "fixed point residual " << res.residual << " did not reach tolerance " << tol;
        throw InvariantViolation(os.str());
    }
    return res;
}

}  // namespace

FractionVector geometric_law(double rho, int capacity_k) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("geometric_law: load must be finite and >= 0");
    if (rho == 0.0) return FractionVector(point_mass_at_zero(capacity_k));
    return FractionVector(law_from_log(std::log(rho), capacity_k));
}

FractionVector birth_death_stationary(const RatePair& rates, int capacity_k) {
    if (!(rates.death > 0.0) || !(rates.birth >= 0.0))
        throw ConfigError("birth_death_stationary: need a >= 0 and b > 0");
    if (rates.birth == 0.0) return FractionVector(point_mass_at_zero(capacity_k));
    if (near_unit_load(rates)) return FractionVector::uniform(capacity_k);
    return FractionVector(law_from_log(std::log1p((rates.birth - rates.death) / rates.death), capacity_k));
}

GeometricRoots geometric_roots(const RatePair& rates) {
    const double a = rates.birth, b = rates.death;
    if (!(a > 0.0 && b > 0.0)) throw ConfigError("geometric_roots: need a > 0 and b > 0");
    if (a == b) return {1.0, 1.0};
    const double common = a + b - std::abs(a - b);
    if (a < b) {
        const double r_min = common / (2.0 * b);
        return {r_min, 1.0 / r_min};
    }
    const double g_min = common / (2.0 * a);
    return {1.0 / g_min, g_min};
}

GeometricForm geometric_coefficients(const RatePair& rates, int capacity_k) {
    const double a = rates.birth, b = rates.death;
    if (!(a > 0.0 && b > 0.0)) throw ConfigError("geometric_form: need a > 0 and b > 0");
    if (near_unit_load(rates)) throw DegenerateCaseError("geometric_form: a == b, use the uniform law");

    // Minimal nonnegative roots of the two quadratics; the one on the
    // stable side is the load (or its inverse), the other is exactly 1.
    const double common = a + b - std::abs(a - b);
    GeometricForm f;
    f.r = a < b ? common / (2.0 * b) : 1.0;
    f.g = a < b ? 1.0 : common / (2.0 * a);

    const int K = capacity_k;
    // Boundary balance at level 0 and normalization:
    //   c1 (r b - a) + c2 g^(K-1) (b - g a) = 0
    //   c1 S(r) + c2 S(g) = 1
    const double m11 = f.r * b - a;
    const double m12 = std::pow(f.g, K - 1) * (b - f.g * a);
    const double m21 = horner_power_sum(f.r, K);
    const double m22 = horner_power_sum(f.g, K);
    const double det = m11 * m22 - m12 * m21;
    f.c1 = -m12 / det;
    f.c2 = m11 / det;
    return f;
}

double GeometricForm::lower_boundary_residual(const RatePair& rates, int K) const {
    return -(c1 + c2 * std::pow(g, K)) * rates.birth + (c1 * r + c2 * std::pow(g, K - 1)) * rates.death;
}

double GeometricForm::upper_boundary_residual(const RatePair& rates, int K) const {
    return (c1 * std::pow(r, K - 1) + c2 * g) * rates.birth - (c1 * std::pow(r, K) + c2) * rates.death;
}

FractionVector geometric_form(const RatePair& rates, int capacity_k) {
    const GeometricForm f = geometric_coefficients(rates, capacity_k);
    std::vector<double> p(capacity_k + 1);
    for (int k = 0; k <= capacity_k; ++k)
        p[k] = f.c1 * std::pow(f.r, k) + f.c2 * std::pow(f.g, capacity_k - k);
    return FractionVector(std::move(p));
}

double load_defect(double rho, const SystemParams& params) {
    const FractionVector p = geometric_law(rho, params.capacity_k);
    const RatePair rates = limiting_rates_unchecked(p.values(), params);
    return rates.birth - rho * rates.death;
}

double stationary_residual(const FractionVector& p, const SystemParams& params) {
    return sup_norm(drift_limiting(p, params));
}

double self_map_residual(const FractionVector& p, const SystemParams& params) {
    const RatePair rates = limiting_rates(p, params);
    const FractionVector image = birth_death_stationary(rates, params.capacity_k);
    return sup_distance(p.values(), image.values());
}

std::vector<double> nonlinear_residual(std::span<const double> p, const SystemParams& params) {
    const int K = static_cast<int>(p.size()) - 1;
    const double p0 = p[0], pK = p[K];
    double parked = 0.0;
    for (int k = 1; k <= K; ++k) parked += k * p[k];
    const double fleet = params.capacity_c - parked;
    const double rental = params.lambda * (1.0 - p0) + params.gamma * p0 * (1.0 - std::pow(p0, params.omega));
    const double mu = params.mu;

    std::vector<double> out(K + 1);
    out[0] = -mu * p0 * (1.0 - p0) * fleet + p[1] * rental * (1.0 - pK);
    for (int k = 1; k < K; ++k)
        out[k] = -mu * (1.0 - p0) * fleet * (p[k - 1] - p[k]) + rental * (1.0 - pK) * (p[k] - p[k + 1]);
    out[K] = -mu * p[K - 1] * (1.0 - p0) * fleet + pK * rental * (1.0 - pK);
    return out;
}

FixedPointResult solve_fixed_point(const SystemParams& params, double tol) {
    params.validate();
    if (!(tol >= 1e-13)) throw ConfigError("solve_fixed_point: tolerance must be >= 1e-13");
    const double rho_max = upper_load(params);
    const double d_lo = load_defect(0.0, params);
    const double d_hi = load_defect(rho_max, params);
    if (!(d_lo > 0.0 && d_hi < 0.0)) throw NoBracketError(describe_bracket(0.0, d_lo, rho_max, d_hi));

    FixedPointResult res = refine(params, {0.0, rho_max, d_lo, d_hi}, tol, 2);
    check_assumption(res, params);
    return res;
}

FixedPointResult solve_fixed_point_from(const SystemParams& params, double rho_seed, double tol) {
    params.validate();
    if (!(tol >= 1e-13)) throw ConfigError("solve_fixed_point: tolerance must be >= 1e-13");
    const double rho_max = upper_load(params);
    double seed = std::clamp(rho_seed, 1e-12, rho_max);
    if (!std::isfinite(seed)) seed = 1.0;

    int evaluations = 1;
    const double d_seed = load_defect(seed, params);
    if (d_seed == 0.0) {
        FixedPointResult res = finish(params, seed, evaluations);
        check_assumption(res, params);
        return res;
    }

    Bracket br{};
    if (d_seed > 0.0) {
        br.lo = seed;
        br.d_lo = d_seed;
        double hi = seed;
        double d = d_seed;
        while (d > 0.0) {
            if (hi >= rho_max) throw NoBracketError(describe_bracket(seed, d_seed, rho_max, d));
            hi = std::min(2.0 * hi, rho_max);
            d = load_defect(hi, params);
            ++evaluations;
            if (d > 0.0) {
                br.lo = hi;
                br.d_lo = d;
            }
        }
        br.hi = hi;
        br.d_hi = d;
    } else {
        br.hi = seed;
        br.d_hi = d_seed;
        double lo = seed;
        double d = d_seed;
        while (d <= 0.0) {
            lo = lo < 1e-12 ? 0.0 : 0.5 * lo;
            d = load_defect(lo, params);
            ++evaluations;
            if (d <= 0.0) {
                if (lo == 0.0) throw NoBracketError(describe_bracket(0.0, d, seed, d_seed));
                br.hi = lo;
                br.d_hi = d;
            }
        }
        br.lo = lo;
        br.d_lo = d;
    }

    FixedPointResult res = refine(params, br, tol, evaluations);
    check_assumption(res, params);
    return res;
}

std::vector<FixedPointResult> uniqueness_probe(const SystemParams& params, int n_starts,
                                               const ProbeOptions& options) {
    params.validate();
    if (n_starts < 1) throw ConfigError("uniqueness_probe: need at least one start");
    const int K = params.capacity_k;
    const double rho_max = upper_load(params);

    std::vector<FixedPointResult> results;
    results.reserve(n_starts);
    for (int s = 0; s < n_starts; ++s) {
        Rng rng(options.seed, static_cast<std::uint64_t>(s));
        std::vector<double> p(K + 1);
        double sum = 0.0;
        for (double& v : p) {
            v = rng.exponential(1.0);
            sum += v;
        }
        for (double& v : p) v /= sum;

        double rho = 0.0;
        for (int it = 0; it < options.max_damped_iterations; ++it) {
            const RatePair rates = limiting_rates_unchecked(p, params);
            rho = std::clamp(rates.birth / rates.death, 0.0, rho_max);
            if (!std::isfinite(rho)) rho = rho_max;
            const FractionVector image = geometric_law(rho, K);
            double change = 0.0;
            for (int k = 0; k <= K; ++k) {
                const double next = (1.0 - options.damping) * p[k] + options.damping * image[k];
                change = std::max(change, std::abs(next - p[k]));
                p[k] = next;
            }
            if (change < 1e-13) break;
        }
        results.push_back(solve_fixed_point_from(params, rho));
    }

    std::vector<FixedPointResult> distinct{results.front()};
    for (const auto& r : results) {
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const FixedPointResult& d) {
            return sup_distance(d.p.values(), r.p.values()) <= options.agreement_tol;
        });
        if (!seen) distinct.push_back(r);
    }
    if (distinct.size() > 1) {
        std::ostringstream os;
        os << "found " << distinct.size() << " distinct fixed points across " << n_starts << " starts";
        throw MultipleFixedPointsError(std::move(distinct), os.str());
    }
    return results;
}

}  // namespace bikeshare
