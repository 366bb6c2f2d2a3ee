#include "bikeshare/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "bikeshare/errors.hpp"

namespace bikeshare {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid parameters: " + what);
}

}  // namespace

void SystemParams::validate() const {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be > 0");
    require(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
    require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
    require(gamma <= mu, "gamma must not exceed mu");
    require(omega >= 0, "omega must be >= 0");
    require(capacity_c >= 1, "capacity_c must be >= 1");
    require(capacity_c < capacity_k, "capacity_c must be < capacity_k");
    require(n_stations >= 2, "n_stations must be >= 2");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
}

bool on_simplex(std::span<const double> y, double tol) {
    if (y.empty()) return false;
    double sum = 0.0;
    for (double v : y) {
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

FractionVector::FractionVector(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw ConfigError("fraction vector needs at least two levels");
    if (!on_simplex(probs_)) {
        double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
        std::ostringstream os;
        os.precision(17);
        os << "fraction vector is not on the simplex (sum = " << sum << ")";
        throw ConfigError(os.str());
    }
    for (double& v : probs_) v = std::clamp(v, 0.0, 1.0);
}

FractionVector FractionVector::uniform(int capacity_k) {
    return FractionVector(std::vector<double>(capacity_k + 1, 1.0 / (capacity_k + 1)));
}

FractionVector FractionVector::point_mass(int capacity_k, int level) {
    if (level < 0 || level > capacity_k) throw ConfigError("point mass level out of range");
    std::vector<double> y(capacity_k + 1, 0.0);
    y[level] = 1.0;
    return FractionVector(std::move(y));
}

double FractionVector::mean_level() const {
    double s = 0.0;
    for (std::size_t k = 1; k < probs_.size(); ++k) s += static_cast<double>(k) * probs_[k];
    return s;
}

}  // namespace bikeshare
