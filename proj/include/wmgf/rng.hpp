#pragma once

#include <cmath>
#include <cstdint>

namespace wmgf {

// Stateless counter-based generator. Every draw is a pure function of
// (seed, stream, counter), so parallel consumers can pull from disjoint
// substreams without coordination and results never depend on scheduling.
//
// Construction: the SplitMix64 output function (Steele, Lea & Flood 2014)
// applied twice, once to absorb (seed, stream) into a base state and once
// to produce output #counter from that base. Integer arithmetic only, so
// the u64 stream is bit-identical on every conforming platform.

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t rng_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const std::uint64_t base = splitmix64_mix(seed + kSplitMix64Gamma * stream);
    return splitmix64_mix(base + kSplitMix64Gamma * counter);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(rng_u64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller over counters (2*counter, 2*counter+1).
inline double rng_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = rng_uniform(seed, stream, 2 * counter);
    const double u2 = rng_uniform(seed, stream, 2 * counter + 1);
    // 1-u1 in (0, 1], so the log argument never vanishes.
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

/// Sequential convenience wrapper over the counter construction.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return rng_u64(seed_, stream_, counter_++); }
    double next_uniform() { return rng_uniform(seed_, stream_, counter_++); }
    double next_normal() { return rng_normal(seed_, stream_, counter_++); }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    /// Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace wmgf
