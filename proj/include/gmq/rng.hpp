#pragma once

#include <cstdint>
#include <random>

namespace gmq {

/// Per-trial random stream. Never shared between trials.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for trial `index` under `master`:
///   child = splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03))
/// Depends only on (master, index), so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL));
}

inline Rng make_trial_rng(std::uint64_t master, std::uint64_t index) {
    return Rng{derive_seed(master, index)};
}

}  // namespace gmq
