#pragma once

// Test-only oracles. None of these call into the library's solver paths.

#include <cmath>
#include <vector>

#include "bikeshare/params.hpp"
#include "bikeshare/rng.hpp"

namespace bikeshare::testing {

inline SystemParams station50(double lambda = 15.0, double mu = 8.0) {
    SystemParams p;
    p.lambda = lambda;
    p.mu = mu;
    p.gamma = 0.25;
    p.omega = 1;
    p.capacity_c = 30;
    p.capacity_k = 50;
    p.n_stations = 1000;
    p.delta = 0.05;
    return p;
}

inline SystemParams analytic_half() {
    SystemParams p;
    p.lambda = 1.0;
    p.mu = 1.0;
    p.gamma = 0.5;
    p.omega = 0;
    p.capacity_c = 1;
    p.capacity_k = 2;
    p.delta = 0.05;
    return p;
}

inline SystemParams analytic_uniform() {
    SystemParams p;
    p.lambda = 5.0;
    p.mu = 4.0;
    p.gamma = 1.0;
    p.omega = 0;
    p.capacity_c = 3;
    p.capacity_k = 4;
    p.delta = 0.05;
    return p;
}

/// Random valid parameter set whose fixed point sits inside the domain.
inline SystemParams random_params(Rng& rng) {
    SystemParams p;
    p.capacity_k = 2 + static_cast<int>(rng.index(40));
    p.capacity_c = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(p.capacity_k - 1)));
    p.lambda = 0.5 + 20.0 * rng.uniform();
    p.mu = 0.5 + 10.0 * rng.uniform();
    p.gamma = p.mu * (0.05 + 0.95 * rng.uniform());
    p.omega = static_cast<int>(rng.index(4));
    p.delta = 0.01;
    p.n_stations = 100;
    return p;
}

inline std::vector<double> random_simplex(Rng& rng, int K) {
    std::vector<double> y(K + 1);
    double s = 0.0;
    for (double& v : y) s += (v = rng.exponential(1.0));
    for (double& v : y) v /= s;
    return y;
}

/// Stationary vector of a dense generator by Gaussian elimination on
/// pi Q = 0 with the last equation replaced by normalization.
inline std::vector<double> dense_stationary(const std::vector<std::vector<double>>& q) {
    const std::size_t n = q.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = q[j][i];
    for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    a[n - 1][n] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
    return x;
}

/// Drift written out level by level (with the sign that makes rows of the
/// generator sum to zero).
inline std::vector<double> componentwise_drift(const std::vector<double>& y, const SystemParams& p) {
    const int K = static_cast<int>(y.size()) - 1;
    double parked = 0.0;
    for (int k = 1; k <= K; ++k) parked += k * y[k];
    double walk = 0.0;
    for (int n = 1; n <= p.omega; ++n) walk += std::pow(y[0], n);
    const double b = p.lambda + p.gamma * walk;
    const double a = p.mu / (1.0 - y[K]) * (p.capacity_c - parked);
    std::vector<double> f(K + 1);
    f[0] = -y[0] * a + y[1] * b;
    for (int k = 1; k < K; ++k) f[k] = (y[k - 1] - y[k]) * a - (y[k] - y[k + 1]) * b;
    f[K] = y[K - 1] * a - y[K] * b;
    return f;
}

}  // namespace bikeshare::testing
