#pragma once

#include "fdsdr/linalg.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <random>

namespace fdsdr {

/// The library's only generator. mt19937_64 output is fixed by the standard and
/// the Boost distributions are portable, so streams are reproducible across
/// platforms.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(mix_seed(mix_seed(seed) ^ (stream * 0xd1b54a32d192ed03ULL)));
}

inline double standard_normal(Rng& rng) {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    // Row-major fill order so the stream layout does not depend on storage order.
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

}  // namespace fdsdr
