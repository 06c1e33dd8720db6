#pragma once

#include <cstdint>
#include <span>

namespace lbf {

struct Hash128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    friend bool operator==(const Hash128&, const Hash128&) = default;
};

// MurmurHash3 x64/128 (Austin Appleby, public domain). The reference takes a
// 32-bit seed; here both lanes are seeded with the full 64-bit value, which is
// identical to the reference for seeds below 2^32.
Hash128 murmur3_128(std::span<const std::uint8_t> data, std::uint64_t seed);

// Hash of a feature vector over its canonical encoding: the little-endian
// IEEE-754 bytes of each double, concatenated.
Hash128 hash_features(std::span<const double> features, std::uint64_t seed);

}  // namespace lbf
