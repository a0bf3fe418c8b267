#pragma once

#include <cmath>
#include <cstdint>

namespace copet {

// xoshiro256++ (Blackman & Vigna, 2019), state seeded with splitmix64.
// Every draw below is built from raw 64-bit outputs with fixed arithmetic,
// so identical seeds reproduce identical streams on every platform. This is
// the single random source for synthetic data and shuffles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            // splitmix64
            x += 0x9E3779B97F4A7C15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, bound); bound > 0.
    std::uint64_t uniform_u64(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Box-Muller; one spare kept between calls.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925287;
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    double lognormal(double log_mean, double log_sigma) {
        return std::exp(log_mean + log_sigma * normal());
    }

    // Distance to the next success in a Bernoulli(p) run, for sparse
    // sampling by skipping: returns k >= 0 such that trials 0..k-1 fail
    // and trial k succeeds. p must be in (0, 1].
    std::uint64_t geometric_skip(double p) {
        if (p >= 1.0) return 0;
        double u = next_double();
        while (u <= 0.0) u = next_double();
        return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace copet
