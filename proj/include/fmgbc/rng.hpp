#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "fmgbc/types.hpp"

namespace fmgbc {

// splitmix64; the per-stream state derivation below leans on its avalanche.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and an index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    splitmix64(s);
    return splitmix64(s);
}

/// Deterministic stream of standard normals. Values depend only on the seed,
/// never on the platform's library distributions, so batches are bitwise
/// reproducible across runs and thread counts.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Box-Muller on two uniforms; u1 kept away from zero.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Unit-variance circularly symmetric complex normal.
    Complex next_complex() {
        const double re = next();
        const double im = next();
        return Complex(re, im) / std::numbers::sqrt2;
    }

private:
    double uniform() { return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53; }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fmgbc
