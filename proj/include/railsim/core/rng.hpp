#ifndef RAILSIM_CORE_RNG_HPP
#define RAILSIM_CORE_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

namespace railsim::core {

/// Counter-based random stream. A stream is fully determined by
/// (seed, stream_id): the n-th draw is a pure function of those two values
/// and n, so streams can be created in any order, consumed in any order,
/// and replayed bit-identically. Distinct ids on the same seed give
/// decorrelated sequences (splitmix64 finalizer over a hashed key).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id)
        : key_(derive_key(seed, stream_id)), counter_(0) {}

    /// Child stream with an id scoped under this stream's key.
    RngStream substream(std::string_view id) const {
        return RngStream(key_, id);
    }

    std::uint64_t next_u64() {
        return finalize(key_ + kGolden * ++counter_);
    }

    /// Uniform in [0, 1), 53 bits of mantissa.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + uniform() * (hi - lo);
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection-free modulo bias is negligible for simulation n << 2^64,
        // but keep it exact anyway.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    /// Standard normal via Box-Muller. Consumes two uniforms per call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> cnormal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    /// Sum of n Bernoulli(p) draws. Deterministic in draw order.
    int binomial(int n, double p) {
        int k = 0;
        for (int i = 0; i < n; ++i) {
            if (bernoulli(p)) ++k;
        }
        return k;
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return h;
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::string_view id) {
        return finalize(finalize(seed + kGolden) ^ fnv1a(id));
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace railsim::core

#endif
