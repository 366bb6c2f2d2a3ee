#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bikeshare {

__extension__ using uint128 = unsigned __int128;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// One named stream of a seeded family: std::mt19937_64 seeded with
/// splitmix64(splitmix64(seed) ^ stream). All variate transforms are written
/// out here so results do not depend on the standard library's distributions.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Uniform integer in [0, n), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t index(std::uint64_t n) {
        std::uint64_t x = engine_();
        uint128 m = static_cast<uint128>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = engine_();
                m = static_cast<uint128>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform over [0, n) excluding `skip`.
    std::uint64_t index_except(std::uint64_t n, std::uint64_t skip) {
        const std::uint64_t i = index(n - 1);
        return i >= skip ? i + 1 : i;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace bikeshare
