#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bikeshare/params.hpp"

namespace bikeshare {

/// Drift F(y) = y V_y of the limiting mean-field system.
std::vector<double> drift_limiting(std::span<const double> y, const SystemParams& params);
inline std::vector<double> drift_limiting(const FractionVector& y, const SystemParams& params) {
    return drift_limiting(y.values(), params);
}

/// Drift of the finite-N mean-field system with level-dependent return rates.
std::vector<double> drift_finite_n(std::span<const double> y, const SystemParams& params);
inline std::vector<double> drift_finite_n(const FractionVector& y, const SystemParams& params) {
    return drift_finite_n(y.values(), params);
}

struct OdeConfig {
    FractionVector initial;
    double t_end = 100.0;
    double step = 0.01;
    /// Stationarity threshold on the sup-norm of the drift.
    double stationarity_tol = 1e-10;
    /// When set, integration runs past t_end up to max_time and stops as soon
    /// as the drift falls below stationarity_tol.
    bool until_stationary = false;
    double max_time = 1e4;
    /// Spacing of recorded samples; 0 records every step. The step is shrunk
    /// so that sample times fall on the integration grid.
    double sample_interval = 0.0;

    void validate() const;
};

/// min(0.01, 0.1 / (lambda + mu + gamma)).
double default_step(const SystemParams& params);

/// Default initial condition: every station holds C bikes.
FractionVector default_initial(const SystemParams& params);

struct Trajectory {
    std::vector<double> times;
    std::vector<FractionVector> states;
    /// Set when an until_stationary run met its threshold.
    bool stationary = false;
    /// Sup-norm of the drift at the last state.
    double final_drift = 0.0;

    const FractionVector& terminal() const { return states.back(); }
};

/// Classical fixed-step RK4 on the chosen drift. After every step negative
/// entries are clamped to zero and the state renormalized; a correction above
/// 1e-7 raises StepInstabilityError. Leaving the region y0, yK <= 1 - delta
/// raises DomainExitError. A start outside that region is allowed to flow in.
Trajectory integrate(const OdeConfig& config, const SystemParams& params, bool finite_n);

/// Central-difference Jacobian of drift_limiting; entry (i, j) = dF_j / dy_i.
std::vector<std::vector<double>> jacobian_fd(std::span<const double> y, const SystemParams& params,
                                             double h);

/// Max column absolute sum.
double column_sum_norm(const std::vector<std::vector<double>>& m);

/// 2 lambda + gamma omega (omega + 5) / 2 + (mu / delta) [(1 + 1/delta) C + K (K + 1) / 2].
double lipschitz_bound(const SystemParams& params);

/// sup_k |x_k - y_k| / (k + 1).
double weighted_sup_distance(std::span<const double> x, std::span<const double> y);
inline double weighted_sup_distance(const FractionVector& x, const FractionVector& y) {
    return weighted_sup_distance(x.values(), y.values());
}

double sup_norm(std::span<const double> v);
double sup_distance(std::span<const double> x, std::span<const double> y);

/// Header "t,y0,...,yK" followed by one row per sample at 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace bikeshare
