#pragma once

#include <span>
#include <vector>

#include "bikeshare/params.hpp"

namespace bikeshare {

/// Sum_{k=0}^{omega-1} p0^k, i.e. (1 - p0^omega) / (1 - p0) without the
/// removable singularity at p0 = 1.
double geometric_walk_factor(double p0, int omega);

/// Bikes in transit per station, C - sum_k k y_k. Values in (-1e-9, 0] are
/// clamped to zero; anything below raises NegativeFleetError.
double fleet_in_transit(std::span<const double> y, int capacity_c);

/// N -> infinity rates of the tagged station:
///   death b = lambda + gamma y0 (1 + y0 + ... + y0^(omega-1))
///   birth a = mu (C - sum_k k y_k) / (1 - yK)
RatePair limiting_rates(std::span<const double> y, const SystemParams& params);
inline RatePair limiting_rates(const FractionVector& y, const SystemParams& params) {
    return limiting_rates(y.values(), params);
}

/// Same formulas with no domain checks. The birth rate may come out negative
/// when sum_k k y_k > C; root finders rely on that sign.
RatePair limiting_rates_unchecked(std::span<const double> y, const SystemParams& params);

/// Service (rental) rate of the finite-N virtual queue; does not depend on N
/// or on the queue level.
double finite_service_rate(std::span<const double> y, const SystemParams& params);
inline double finite_service_rate(const FractionVector& y, const SystemParams& params) {
    return finite_service_rate(y.values(), params);
}

/// Level-dependent return rates xi_l, l = 0..K-1, of the finite-N virtual
/// queue. Levels below C also see the tagged station's own bikes in transit.
std::vector<double> finite_arrival_rates(std::span<const double> y, const SystemParams& params);
inline std::vector<double> finite_arrival_rates(const FractionVector& y, const SystemParams& params) {
    return finite_arrival_rates(y.values(), params);
}

/// Tridiagonal birth-death generator on levels 0..K. `upper[k]` is the rate
/// k -> k+1, `lower[k]` the rate k+1 -> k, `diag` makes each row sum to zero.
struct TridiagonalGenerator {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    int capacity() const noexcept { return static_cast<int>(diag.size()) - 1; }
    double at(int row, int col) const;
    std::vector<std::vector<double>> dense() const;

    /// Row vector times generator, y * V.
    std::vector<double> left_multiply(std::span<const double> y) const;
    void left_multiply(std::span<const double> y, std::span<double> out) const;
};

/// Constant-rate generator: birth a above the diagonal, death b below it.
TridiagonalGenerator build_generator(const RatePair& rates, int capacity_k);

/// Level-dependent births (size K) with a common death rate.
TridiagonalGenerator build_generator(std::span<const double> births, double death);

}  // namespace bikeshare
