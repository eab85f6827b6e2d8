#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crkit/gauss_rat.hpp"

namespace crkit {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

inline long random_int(Rng& rng, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

/// Gaussian integer with both parts uniform in [-bound, bound].
inline GaussRat random_gauss_int(Rng& rng, long bound) {
    return GaussRat::from_ints(random_int(rng, -bound, bound), random_int(rng, -bound, bound));
}

inline std::vector<GaussRat> random_gauss_point(Rng& rng, std::size_t dim, long bound) {
    std::vector<GaussRat> p;
    p.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) p.push_back(random_gauss_int(rng, bound));
    return p;
}

/// Seed derived for trial t of a computation seeded with seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t t) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (t + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace crkit
