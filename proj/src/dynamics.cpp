#include "bikeshare/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bikeshare/errors.hpp"
#include "bikeshare/rates.hpp"

namespace bikeshare {

namespace {

constexpr double kRepairBudget = 1e-7;

using DriftFn = void (*)(std::span<const double>, const SystemParams&, std::span<double>);

void limiting_into(std::span<const double> y, const SystemParams& params, std::span<double> out) {
    const int K = static_cast<int>(y.size()) - 1;
    build_generator(limiting_rates(y, params), K).left_multiply(y, out);
}

void finite_into(std::span<const double> y, const SystemParams& params, std::span<double> out) {
    const auto births = finite_arrival_rates(y, params);
    build_generator(births, finite_service_rate(y, params)).left_multiply(y, out);
}

bool inside_domain(std::span<const double> y, double delta) {
    return y.front() <= 1.0 - delta && y.back() <= 1.0 - delta;
}

// Clamp-then-renormalize. Returns the L1 size of the correction.
double repair(std::vector<double>& y) {
    double correction = 0.0;
    double sum = 0.0;
    for (double& v : y) {
        if (v < 0.0) {
            correction -= v;
            v = 0.0;
        }
        sum += v;
    }
    correction += std::abs(sum - 1.0);
    for (double& v : y) v /= sum;
    return correction;
}

}  // namespace

std::vector<double> drift_limiting(std::span<const double> y, const SystemParams& params) {
    std::vector<double> out(y.size());
    limiting_into(y, params, out);
    return out;
}

std::vector<double> drift_finite_n(std::span<const double> y, const SystemParams& params) {
    std::vector<double> out(y.size());
    finite_into(y, params, out);
    return out;
}

void OdeConfig::validate() const {
    if (initial.size() < 2) throw ConfigError("ode: initial condition is empty");
    if (!(t_end > 0.0)) throw ConfigError("ode: t_end must be > 0");
    if (!(step > 0.0)) throw ConfigError("ode: step must be > 0");
    if (step > t_end) throw ConfigError("ode: step must not exceed t_end");
    if (!(stationarity_tol > 0.0)) throw ConfigError("ode: stationarity_tol must be > 0");
    if (until_stationary && !(max_time >= t_end)) throw ConfigError("ode: max_time must be >= t_end");
    if (sample_interval < 0.0) throw ConfigError("ode: sample_interval must be >= 0");
}

double default_step(const SystemParams& params) {
    return std::min(0.01, 0.1 / (params.lambda + params.mu + params.gamma));
}

FractionVector default_initial(const SystemParams& params) {
    return FractionVector::point_mass(params.capacity_k, params.capacity_c);
}

Trajectory integrate(const OdeConfig& config, const SystemParams& params, bool finite_n) {
    config.validate();
    params.validate();
    if (config.initial.capacity() != params.capacity_k)
        throw ConfigError("ode: initial condition has the wrong number of levels");

    const DriftFn drift = finite_n ? &finite_into : &limiting_into;
    const std::size_t n = config.initial.size();
    const double horizon = config.until_stationary ? config.max_time : config.t_end;

    double h = config.step;
    long record_every = 1;
    if (config.sample_interval > 0.0) {
        record_every = std::max(1L, static_cast<long>(std::ceil(config.sample_interval / h - 1e-9)));
        h = config.sample_interval / static_cast<double>(record_every);
    }
    const long full_steps = static_cast<long>(std::floor(horizon / h + 1e-9));

    std::vector<double> y = config.initial.vector();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);

    Trajectory out;
    out.times.push_back(0.0);
    out.states.push_back(config.initial);

    bool was_inside = inside_domain(y, params.delta);
    double t = 0.0;
    long step_index = 0;
    bool recorded_last = true;

    while (true) {
        drift(y, params, k1);
        out.final_drift = sup_norm(k1);
        if (config.until_stationary && out.final_drift < config.stationarity_tol) {
            out.stationary = true;
            break;
        }
        double dt = h;
        if (step_index >= full_steps) {
            dt = horizon - t;
            if (dt <= 1e-12 * std::max(1.0, horizon)) break;
        }

        for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * dt * k1[i];
        drift(stage, params, k2);
        for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * dt * k2[i];
        drift(stage, params, k3);
        for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + dt * k3[i];
        drift(stage, params, k4);
        for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        ++step_index;
        t = step_index <= full_steps ? static_cast<double>(step_index) * h : horizon;

        const double correction = repair(y);
        if (correction > kRepairBudget) {
            std::ostringstream os;
            os << "simplex repair of " << correction << " at t = " << t << " exceeds budget";
            throw StepInstabilityError(os.str());
        }

        const bool inside = inside_domain(y, params.delta);
        if (was_inside && !inside) {
            std::ostringstream os;
            os.precision(10);
            os << "trajectory left the problematic-station domain at t = " << t << " (y0 = " << y.front()
               << ", yK = " << y.back() << ", delta = " << params.delta << ")";
            throw DomainExitError(t, os.str());
        }
        was_inside = was_inside || inside;

        recorded_last = step_index % record_every == 0;
        if (recorded_last) {
            out.times.push_back(t);
            out.states.emplace_back(y);
        }
    }

    if (!recorded_last) {
        out.times.push_back(t);
        out.states.emplace_back(y);
    }
    return out;
}

std::vector<std::vector<double>> jacobian_fd(std::span<const double> y, const SystemParams& params,
                                             double h) {
    if (!(h >= 1e-8 && h <= 1e-4)) throw ConfigError("jacobian_fd: step must lie in [1e-8, 1e-4]");
    const std::size_t n = y.size();
    std::vector<std::vector<double>> jac(n, std::vector<double>(n));
    std::vector<double> plus(y.begin(), y.end()), minus(y.begin(), y.end());
    std::vector<double> f_plus(n), f_minus(n);
    for (std::size_t i = 0; i < n; ++i) {
        plus[i] = y[i] + h;
        minus[i] = y[i] - h;
        limiting_into(plus, params, f_plus);
        limiting_into(minus, params, f_minus);
        for (std::size_t j = 0; j < n; ++j) jac[i][j] = (f_plus[j] - f_minus[j]) / (2.0 * h);
        plus[i] = y[i];
        minus[i] = y[i];
    }
    return jac;
}

double column_sum_norm(const std::vector<std::vector<double>>& m) {
    double best = 0.0;
    if (m.empty()) return best;
    for (std::size_t j = 0; j < m.front().size(); ++j) {
        double s = 0.0;
        for (const auto& row : m) s += std::abs(row[j]);
        best = std::max(best, s);
    }
    return best;
}

double lipschitz_bound(const SystemParams& params) {
    if (!(params.delta > 0.0 && params.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    const double w = params.omega;
    const double C = params.capacity_c;
    const double K = params.capacity_k;
    const double d = params.delta;
    return 2.0 * params.lambda + params.gamma * w * (w + 5.0) / 2.0 +
           params.mu / d * ((1.0 + 1.0 / d) * C + K * (K + 1.0) / 2.0);
}

double weighted_sup_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("weighted_sup_distance: length mismatch");
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        d = std::max(d, std::abs(x[k] - y[k]) / static_cast<double>(k + 1));
    return d;
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("sup_distance: length mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    const int K = trajectory.states.empty() ? 0 : trajectory.states.front().capacity();
    os << "t";
    for (int k = 0; k <= K; ++k) os << ",y" << k;
    os << '\n';
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        os << trajectory.times[i];
        for (double v : trajectory.states[i].values()) os << ',' << v;
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace bikeshare
