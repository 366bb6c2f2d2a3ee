#include "bikeshare/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bikeshare/dynamics.hpp"
#include "bikeshare/errors.hpp"
#include "bikeshare/fixed_point.hpp"
#include "bikeshare/simulator.hpp"

namespace bikeshare {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << std::scientific << v;
    return os.str();
}

template <class Fn>
CheckResult guarded(const std::string& name, Fn&& fn) {
    CheckResult res{name, false, ""};
    try {
        fn(res);
    } catch (const BikeshareError& e) {
        res.passed = false;
        res.detail = e.name() + ": " + e.what();
    }
    return res;
}

}  // namespace

std::vector<double> sample_domain_point(const SystemParams& params, Rng& rng, double fleet_margin) {
    const int K = params.capacity_k;
    const double limit = 1.0 - params.delta;
    std::vector<double> y(K + 1);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const double shape = rng.uniform();
        if (shape < 0.1) {
            // Empty stations at the edge of the domain.
            double rest = 0.0;
            for (int k = 1; k <= K; ++k) rest += (y[k] = rng.exponential(1.0) * (k <= params.capacity_c ? 1.0 : 0.01));
            for (int k = 1; k <= K; ++k) y[k] *= params.delta / rest;
            y[0] = limit;
        } else {
            const double power = std::exp((rng.uniform() * 2.0 - 1.0) * std::log(6.0));
            double sum = 0.0;
            for (double& v : y) sum += (v = std::pow(rng.exponential(1.0), power));
            for (double& v : y) v /= sum;
        }
        double parked = 0.0;
        for (int k = 1; k <= K; ++k) parked += k * y[k];
        if (y[0] <= limit && y[K] <= limit && parked <= params.capacity_c - fleet_margin) return y;
    }
    throw InvariantViolation("could not sample a point of the restricted domain");
}

double max_sampled_jacobian_norm(const SystemParams& params, int samples, std::uint64_t seed, double h) {
    Rng rng(seed, 0x11b);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const auto y = sample_domain_point(params, rng, 1e-4);
        worst = std::max(worst, column_sum_norm(jacobian_fd(y, params, h)));
    }
    return worst;
}

std::vector<CheckResult> run_validation(const SystemParams& params, const ValidationOptions& options) {
    params.validate();
    std::vector<CheckResult> checks;
    const FixedPointResult fp = solve_fixed_point(params);
    const int K = params.capacity_k;

    checks.push_back(guarded("fixed_point_characterizations", [&](CheckResult& r) {
        const double sta2 = fp.residual;
        const double sta4 = self_map_residual(fp.p, params);
        const double uniq = sup_norm(nonlinear_residual(fp.p, params));
        r.passed = sta2 < 1e-10 && sta4 < 1e-10 && uniq < 1e-10;
        r.detail = "pV_p=" + fmt(sta2) + " self-map=" + fmt(sta4) + " cleared=" + fmt(uniq) + " (< 1e-10)";
    }));

    checks.push_back(guarded("geometric_representation", [&](CheckResult& r) {
        Rng rng(options.seed, 0x7e0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const RatePair rates{0.01 + 10.0 * rng.uniform(), 0.01 + 10.0 * rng.uniform()};
            const int k = 1 + static_cast<int>(rng.index(100));
            worst = std::max(worst, sup_distance(geometric_form(rates, k).values(),
                                                 birth_death_stationary(rates, k).values()));
        }
        if (std::abs(fp.rates.birth - fp.rates.death) > 1e-13 * fp.rates.total())
            worst = std::max(worst, sup_distance(geometric_form(fp.rates, K).values(), fp.p.values()));
        r.passed = worst < 1e-12;
        r.detail = "max deviation " + fmt(worst) + " (< 1e-12)";
    }));

    checks.push_back(guarded("uniqueness_probe", [&](CheckResult& r) {
        ProbeOptions po;
        po.seed = options.seed;
        const auto results = uniqueness_probe(params, options.probe_starts, po);
        r.passed = true;
        r.detail = std::to_string(results.size()) + " starts agree within 1e-8";
    }));

    checks.push_back(guarded("ode_terminal_vs_fixed_point", [&](CheckResult& r) {
        OdeConfig ode;
        ode.initial = default_initial(params);
        ode.step = default_step(params);
        ode.t_end = 100.0 / params.lambda;
        ode.until_stationary = true;
        ode.max_time = 1e5 / params.lambda;
        ode.sample_interval = ode.max_time;
        const Trajectory traj = integrate(ode, params, false);
        const double gap = sup_distance(traj.terminal().values(), fp.p.values());
        r.passed = traj.stationary && gap < 1e-6;
        r.detail = "terminal gap " + fmt(gap) + " (< 1e-6) at t = " + fmt(traj.times.back());
    }));

    checks.push_back(guarded("lipschitz_bound", [&](CheckResult& r) {
        const double norm = max_sampled_jacobian_norm(params, options.lipschitz_samples, options.seed);
        const double bound = lipschitz_bound(params);
        r.passed = norm <= bound;
        r.detail = "max sampled norm " + fmt(norm) + " <= M = " + fmt(bound);
    }));

    if (options.run_simulation) {
        checks.push_back(guarded("simulation_vs_fixed_point", [&](CheckResult& r) {
            SimConfig sc;
            sc.params = params;
            sc.seed = options.seed;
            sc.t_warmup = 500.0 / params.lambda;
            sc.t_measure = 2000.0 / params.lambda;
            const SimReport rep = simulate(sc);
            const double budget = 5.0 / std::sqrt(static_cast<double>(params.n_stations));
            const double gap = sup_distance(rep.time_avg_measure.values(), fp.p.values());
            const double g0 = std::abs(rep.time_avg_measure.front() - fp.p.front());
            const double gk = std::abs(rep.time_avg_measure.back() - fp.p.back());
            r.passed = gap < budget && g0 < 0.02 && gk < 0.02;
            r.detail = "sup gap " + fmt(gap) + " (< " + fmt(budget) + "), |dp0| " + fmt(g0) + ", |dpK| " + fmt(gk) +
                       " (< 0.02)";
        }));
    }
    return checks;
}

}  // namespace bikeshare
