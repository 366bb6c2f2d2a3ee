#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bikeshare/errors.hpp"
#include "bikeshare/params.hpp"

namespace bikeshare {

struct FixedPointResult {
    FractionVector p;
    double rho = 0.0;
    RatePair rates;
    /// Sup-norm of p V_p.
    double residual = 0.0;
    int iterations = 0;
};

/// The root pair (r, g) with r g = 1 of
///   a - (a + b) r + b r^2 = 0   and   a g^2 - (a + b) g + b = 0,
/// taking the root different from 1 on each side, so r = a / b.
struct GeometricRoots {
    double r = 1.0;
    double g = 1.0;
};

/// Stationary law of the M/M/1/K birth-death chain with constant rates:
/// p_k proportional to rho^k, uniform when a == b (to 1e-13 relative).
FractionVector birth_death_stationary(const RatePair& rates, int capacity_k);

/// Truncated geometric law for a given load; shares its numerics with
/// birth_death_stationary.
FractionVector geometric_law(double rho, int capacity_k);

GeometricRoots geometric_roots(const RatePair& rates);

/// Coefficients of p_k = c1 r^k + c2 g^(K-k).
struct GeometricForm {
    double r = 1.0;
    double g = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;

    /// Residuals of the two boundary balance equations at k = 0 and k = K.
    double lower_boundary_residual(const RatePair& rates, int capacity_k) const;
    double upper_boundary_residual(const RatePair& rates, int capacity_k) const;
};

/// Solves the boundary balance at k = 0 together with normalization for
/// (c1, c2), using the minimal nonnegative root on each side: (rho, 1) when
/// a < b and (1, 1/rho) when a > b. Throws DegenerateCaseError when a == b.
GeometricForm geometric_coefficients(const RatePair& rates, int capacity_k);
FractionVector geometric_form(const RatePair& rates, int capacity_k);

struct SolverOptions {
    double tol = 1e-11;
    int max_iterations = 500;
};

/// Solves p V_p = 0, p e = 1 through the scalar load equation
/// a(p(rho)) = rho b(p(rho)), bracketed on [0, mu C / (delta lambda)].
FixedPointResult solve_fixed_point(const SystemParams& params, double tol = 1e-11);

/// Same, but searches for a sign change outward from `rho_seed` first.
FixedPointResult solve_fixed_point_from(const SystemParams& params, double rho_seed, double tol = 1e-11);

/// a(p(rho)) - rho b(p(rho)).
double load_defect(double rho, const SystemParams& params);

/// Sup-norm of p V_p with the limiting rates evaluated at p.
double stationary_residual(const FractionVector& p, const SystemParams& params);

/// Sup-norm of p minus the truncated geometric law at rho(p) = a(p) / b(p).
double self_map_residual(const FractionVector& p, const SystemParams& params);

/// Left-hand sides of the cleared-denominator balance equations, one per level.
std::vector<double> nonlinear_residual(std::span<const double> p, const SystemParams& params);
inline std::vector<double> nonlinear_residual(const FractionVector& p, const SystemParams& params) {
    return nonlinear_residual(p.values(), params);
}

class MultipleFixedPointsError : public BikeshareError {
public:
    MultipleFixedPointsError(std::vector<FixedPointResult> results, const std::string& what)
        : BikeshareError(ErrorKind::Domain, "MultipleFixedPointsError", what), results_(std::move(results)) {}

    const std::vector<FixedPointResult>& results() const noexcept { return results_; }

private:
    std::vector<FixedPointResult> results_;
};

struct ProbeOptions {
    std::uint64_t seed = 0x5eed;
    double damping = 0.5;
    int max_damped_iterations = 10000;
    double agreement_tol = 1e-8;
};

/// Multi-start check of uniqueness. Each start draws a random simplex point,
/// runs damped iteration of the geometric self-map, then solves the scalar
/// load equation outward from the resulting load. Results are ordered by
/// start index; distinct answers raise MultipleFixedPointsError.
std::vector<FixedPointResult> uniqueness_probe(const SystemParams& params, int n_starts,
                                               const ProbeOptions& options = {});

}  // namespace bikeshare
