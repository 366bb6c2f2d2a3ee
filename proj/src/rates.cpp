#include "bikeshare/rates.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bikeshare/errors.hpp"

namespace bikeshare {

namespace {

constexpr double kFleetTolerance = 1e-9;

double raw_fleet(std::span<const double> y, int capacity_c) {
    double parked = 0.0;
    for (std::size_t k = 1; k < y.size(); ++k) parked += static_cast<double>(k) * y[k];
    return static_cast<double>(capacity_c) - parked;
}

double free_fraction(std::span<const double> y) {
    const double y_full = y.back();
    if (!(y_full < 1.0 - std::numeric_limits<double>::epsilon())) {
        std::ostringstream os;
        os.precision(17);
        os << "fraction of full stations reached " << y_full << "; return rate undefined";
        throw FullSystemError(os.str());
    }
    return 1.0 - y_full;
}

}  // namespace

double geometric_walk_factor(double p0, int omega) {
    // Horner form of 1 + p0 + ... + p0^(omega-1).
    double sum = 0.0;
    for (int k = 0; k < omega; ++k) sum = sum * p0 + 1.0;
    return sum;
}

double fleet_in_transit(std::span<const double> y, int capacity_c) {
    const double fleet = raw_fleet(y, capacity_c);
    if (fleet < -kFleetTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "bikes in transit would be negative (C - sum k y_k = " << fleet << ")";
        throw NegativeFleetError(os.str());
    }
    return fleet < 0.0 ? 0.0 : fleet;
}

double finite_service_rate(std::span<const double> y, const SystemParams& params) {
    const double y0 = y.front();
    return params.lambda + params.gamma * y0 * geometric_walk_factor(y0, params.omega);
}

RatePair limiting_rates(std::span<const double> y, const SystemParams& params) {
    const double free = free_fraction(y);
    const double fleet = fleet_in_transit(y, params.capacity_c);
    return {params.mu * fleet / free, finite_service_rate(y, params)};
}

RatePair limiting_rates_unchecked(std::span<const double> y, const SystemParams& params) {
    // 1 - yK as the sum of the other entries keeps precision when yK is close to 1.
    double free = 0.0;
    for (std::size_t k = 0; k + 1 < y.size(); ++k) free += y[k];
    return {params.mu * raw_fleet(y, params.capacity_c) / free, finite_service_rate(y, params)};
}

std::vector<double> finite_arrival_rates(std::span<const double> y, const SystemParams& params) {
    const double free = free_fraction(y);
    const double fleet = fleet_in_transit(y, params.capacity_c);
    const double n = static_cast<double>(params.n_stations);
    const double scale = params.mu / (n * free);
    const double others = (n - 1.0) * fleet;

    const int K = static_cast<int>(y.size()) - 1;
    std::vector<double> xi(K);
    for (int l = 0; l < K; ++l) {
        const double own = l <= params.capacity_c - 1 ? static_cast<double>(params.capacity_c - l) : 0.0;
        xi[l] = scale * (own + others);
    }
    return xi;
}

double TridiagonalGenerator::at(int row, int col) const {
    if (row == col) return diag[row];
    if (col == row + 1) return upper[row];
    if (col == row - 1) return lower[col];
    return 0.0;
}

std::vector<std::vector<double>> TridiagonalGenerator::dense() const {
    const int n = static_cast<int>(diag.size());
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) m[i][j] = at(i, j);
    return m;
}

void TridiagonalGenerator::left_multiply(std::span<const double> y, std::span<double> out) const {
    const std::size_t n = diag.size();
    for (std::size_t k = 0; k < n; ++k) {
        double v = y[k] * diag[k];
        if (k > 0) v += y[k - 1] * upper[k - 1];
        if (k + 1 < n) v += y[k + 1] * lower[k];
        out[k] = v;
    }
}

std::vector<double> TridiagonalGenerator::left_multiply(std::span<const double> y) const {
    std::vector<double> out(diag.size());
    left_multiply(y, out);
    return out;
}

TridiagonalGenerator build_generator(const RatePair& rates, int capacity_k) {
    const std::vector<double> births(capacity_k, rates.birth);
    return build_generator(births, rates.death);
}

TridiagonalGenerator build_generator(std::span<const double> births, double death) {
    const std::size_t K = births.size();
    TridiagonalGenerator g;
    g.upper.assign(births.begin(), births.end());
    g.lower.assign(K, death);
    g.diag.assign(K + 1, 0.0);
    // Summing the off-diagonal entries of each row with the same operands the
    // row-sum check uses makes the sums exactly zero.
    for (std::size_t k = 0; k <= K; ++k) {
        double out = 0.0;
        if (k > 0) out += g.lower[k - 1];
        if (k < K) out += g.upper[k];
        g.diag[k] = -out;
    }
    return g;
}

}  // namespace bikeshare
