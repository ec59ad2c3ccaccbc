#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rfs {

/// Seeded PRNG for reproducible simulation and sampling.
///
/// PCG-XSH-RR 64/32 (O'Neill, pcg32). Fixed-width integer state, so a
/// (seed, stream) pair produces the identical sequence on every platform.
/// Distinct stream ids select independent sequences, which is how Monte
/// Carlo runs and the filter's samplers get decoupled draws from one
/// base seed.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed = 0x853c49e6748fea9bULL, std::uint64_t stream = 1) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform double in [0, 1) with 53-bit resolution (two 32-bit draws).
    double uniform() {
        std::uint64_t hi = static_cast<std::uint64_t>(next_u32()) << 21u;
        std::uint64_t lo = static_cast<std::uint64_t>(next_u32()) >> 11u;
        return static_cast<double>(hi | lo) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n) via Lemire's multiply-shift reduction.
    std::uint32_t uniform_int(std::uint32_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
        return static_cast<std::uint32_t>(m >> 32u);
    }

    /// Standard normal via Box-Muller. Two uniforms per draw, no caching,
    /// so the consumed stream length per call is fixed.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Poisson count by Knuth's product-of-uniforms method. Intended for
    /// small rates (exp(-rate) must not underflow; rate <= ~700).
    int poisson(double rate) {
        if (rate < 0.0) throw std::invalid_argument("poisson: rate must be nonnegative");
        if (rate == 0.0) return 0;
        double limit = std::exp(-rate);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    /// Fisher-Yates shuffle, descending index order.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_int(static_cast<std::uint32_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

}  // namespace rfs
