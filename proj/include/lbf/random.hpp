#pragma once

#include <cstdint>
#include <random>

namespace lbf {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds from one
// experiment seed so that components never share a random stream.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace lbf
