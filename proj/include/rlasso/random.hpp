#pragma once

#include <cstdint>
#include <initializer_list>

namespace rlasso {

/// SplitMix64 finalizer (Steele, Lea and Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based child seed: a pure function of the parent seed and the path
/// of counters, so any replication's streams can be rebuilt independently of
/// the order in which replications run.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = splitmix64(seed);
    for (std::uint64_t counter : path) state = splitmix64(state ^ splitmix64(counter + 1));
    return state;
}

}  // namespace rlasso
