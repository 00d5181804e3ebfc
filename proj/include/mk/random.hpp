#pragma once

#include <cstdint>

namespace mk {

/// Seed used whenever none is given.
inline constexpr std::uint64_t kDefaultSeed = 42;

// SplitMix64 finalizer. Every seed derivation and every sampled draw goes through it,
// so results are a pure function of (seed, index) and independent of thread schedule.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0,1) with 53 random bits, keyed by (seed, index).
constexpr double uniform_draw(std::uint64_t seed, std::uint64_t index) noexcept {
    return static_cast<double>(hash_combine(seed, index) >> 11) * 0x1.0p-53;
}

/// Seed for trial `trial` at sample size `n` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n,
                                    std::uint64_t trial) noexcept {
    return hash_combine(hash_combine(master, n), trial);
}

}  // namespace mk
