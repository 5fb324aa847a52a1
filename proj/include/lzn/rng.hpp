#pragma once

// Seeding helpers.  Every randomized routine derives an independent stream
// from (run seed, item index) so results do not depend on scheduling.

#include <cstdint>
#include <random>

namespace lzn {

/// splitmix64 step; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index = 0,
                                std::uint64_t stream = 0) {
    return std::mt19937_64(mix64(mix64(seed ^ (stream * 0xa0761d6478bd642fULL)) + index));
}

} // namespace lzn
