#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lbf/hash.hpp"

namespace lbf {

using FeatureView = std::span<const double>;

// Bits needed by a classic Bloom filter holding n keys at false-positive rate
// epsilon with optimal reject time: ceil(1.44 * n * log2(1/epsilon)).
std::uint64_t size_for_target_fpr(std::uint64_t n, double epsilon);

// round((m/n) ln 2), clamped to [1, 64].
unsigned optimal_k(std::uint64_t m, std::uint64_t n);

// Classic Bloom filter with k double-hashed probes,
// h_j(x) = (h1(x) + j * h2(x)) mod m, over a seeded 128-bit hash of the
// canonical feature encoding.
//
// m == 0 is the degenerate "no space" filter: it accepts everything so that
// it never introduces false negatives.
class BloomFilter {
public:
    static constexpr unsigned kMaxHashes = 64;

    BloomFilter() = default;
    BloomFilter(std::uint64_t m, unsigned k, std::uint64_t seed);

    template <typename Keys>
    static BloomFilter build(const Keys& keys, std::uint64_t m, unsigned k, std::uint64_t seed) {
        BloomFilter f(m, k, seed);
        for (const auto& key : keys) f.insert(FeatureView(key));
        return f;
    }

    void insert(FeatureView key) { insert_hash(hash(key), k_); }
    bool contains(FeatureView x) const { return contains_hash(hash(x), k_); }

    // Probe-prefix access used by the adaptive learned filter, which inserts
    // and tests with only the first `probes` of this filter's k functions.
    Hash128 hash(FeatureView x) const { return hash_features(x, seed_); }
    void insert_hash(Hash128 h, unsigned probes);
    bool contains_hash(Hash128 h, unsigned probes) const;

    std::uint64_t m() const { return m_; }
    unsigned k() const { return k_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t n_inserted() const { return n_inserted_; }
    bool degenerate() const { return m_ == 0; }
    std::uint64_t popcount() const;
    std::uint64_t size_bits() const { return m_; }

    // "LBF1" | version u16 | m u64 | k u16 | seed u64 | ceil(m/8) bytes of bits.
    // Bit i lives in byte i/8 at position i%8.
    std::vector<std::uint8_t> serialize() const;
    static BloomFilter deserialize(std::span<const std::uint8_t> bytes);

    friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

private:
    std::uint64_t probe(Hash128 h, unsigned j) const { return (h.lo + j * h.hi) % m_; }

    std::uint64_t m_ = 0;
    unsigned k_ = 1;
    std::uint64_t seed_ = 0;
    std::uint64_t n_inserted_ = 0;
    std::vector<std::uint64_t> words_;
};

// Fraction of `non_keys` accepted by `filter`.
template <typename Filter, typename Rows>
double empirical_fpr(const Filter& filter, const Rows& non_keys);

}  // namespace lbf

#include "lbf/detail/empirical_fpr.hpp"
