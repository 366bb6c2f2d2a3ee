#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bikeshare {

/// Model constants for N identical stations.
///
/// Every station starts with `capacity_c` bikes and has `capacity_k` docks.
/// Customers arrive at each station at rate `lambda`, ride for an exp(mu)
/// time, and a customer who finds an empty station walks (exp(gamma)) to
/// another station at most `omega` times before leaving. `delta` bounds the
/// fraction of empty or full stations away from one.
struct SystemParams {
    double lambda = 1.0;
    double mu = 1.0;
    double gamma = 1.0;
    int omega = 1;
    int capacity_c = 1;
    int capacity_k = 2;
    long n_stations = 100;
    double delta = 0.05;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;

    bool operator==(const SystemParams&) const = default;
};

/// Probability vector over station levels 0..K (number of parked bikes).
class FractionVector {
public:
    static constexpr double kSumTolerance = 1e-9;

    FractionVector() = default;
    /// Throws ConfigError unless every entry lies in [0,1] and the entries sum to 1.
    explicit FractionVector(std::vector<double> probs);

    static FractionVector uniform(int capacity_k);
    /// All mass at `level`.
    static FractionVector point_mass(int capacity_k, int level);

    std::size_t size() const noexcept { return probs_.size(); }
    int capacity() const noexcept { return static_cast<int>(probs_.size()) - 1; }
    double operator[](std::size_t k) const { return probs_[k]; }
    std::span<const double> values() const noexcept { return probs_; }
    const std::vector<double>& vector() const noexcept { return probs_; }

    double front() const { return probs_.front(); }
    double back() const { return probs_.back(); }

    /// Sum over k of k * y_k.
    double mean_level() const;

private:
    std::vector<double> probs_;
};

/// Birth (bike return) and death (bike rental) rates of the tagged station.
struct RatePair {
    double birth = 0.0;
    double death = 1.0;

    double total() const noexcept { return birth + death; }
    double load() const noexcept { return birth / death; }
};

/// Checks the simplex conditions without throwing; used for diagnostics.
bool on_simplex(std::span<const double> y, double tol = FractionVector::kSumTolerance);

}  // namespace bikeshare
