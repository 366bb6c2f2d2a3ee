#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bikeshare/params.hpp"
#include "bikeshare/rng.hpp"

namespace bikeshare {

/// Random point of the simplex with y0, yK <= 1 - delta and
/// sum_k k y_k <= C - fleet_margin. Mixes flat, spiky and boundary-heavy draws.
std::vector<double> sample_domain_point(const SystemParams& params, Rng& rng, double fleet_margin = 1e-4);

/// Largest max-column-sum norm of the finite-difference Jacobian over
/// `samples` domain points.
double max_sampled_jacobian_norm(const SystemParams& params, int samples, std::uint64_t seed, double h = 1e-6);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 7;
    int lipschitz_samples = 2000;
    int probe_starts = 20;
    bool run_simulation = true;
};

/// Cross-checks the fixed point against its algebraic characterizations, the
/// ODE terminal state, the Lipschitz bound, the geometric representation and
/// (optionally) a stochastic simulation with N = params.n_stations.
std::vector<CheckResult> run_validation(const SystemParams& params, const ValidationOptions& options = {});

}  // namespace bikeshare
