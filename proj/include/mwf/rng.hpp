#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "mwf/types.hpp"

namespace mwf {

// splitmix64 step: advances `state` and returns a well-mixed 64-bit word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic sub-stream seed from (base seed, stream tag, element index).
// Full avalanche between absorptions keeps streams independent even for
// adjacent indices, so Monte-Carlo trials can be sharded across threads and
// still reproduce the single-thread results sample for sample.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    std::uint64_t s = mix64(base + 0x9e3779b97f4a7c15ull);
    s = mix64(s ^ (stream + 0xd1b54a32d192ed03ull));
    s = mix64(s ^ (index + 0x94d049bb133111ebull));
    return s;
}

// Small self-contained generator. Gaussians come from a hand-rolled
// Box-Muller rather than std::normal_distribution so that byte-identical
// output does not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0,1) with 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal (mean 0, variance 1).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    Complex cgaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * gaussian();
        const double im = s * gaussian();
        return {re, im};
    }

private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mwf
