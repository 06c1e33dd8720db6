#include "lbf/bloom.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "lbf/byte_io.hpp"
#include "lbf/error.hpp"

namespace lbf {
namespace {
constexpr char kMagic[] = "LBF1";
constexpr std::uint16_t kVersion = 1;
}  // namespace

std::uint64_t size_for_target_fpr(std::uint64_t n, double epsilon) {
    if (n == 0) throw InvalidArgument("size_for_target_fpr: n must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("size_for_target_fpr: epsilon must lie in (0, 1)");
    }
    return static_cast<std::uint64_t>(std::ceil(1.44 * static_cast<double>(n) * std::log2(1.0 / epsilon)));
}

unsigned optimal_k(std::uint64_t m, std::uint64_t n) {
    if (m == 0 || n == 0) throw InvalidArgument("optimal_k: m and n must be >= 1");
    double k = std::round(static_cast<double>(m) / static_cast<double>(n) * std::numbers::ln2);
    if (k < 1.0) return 1;
    if (k > BloomFilter::kMaxHashes) return BloomFilter::kMaxHashes;
    return static_cast<unsigned>(k);
}

BloomFilter::BloomFilter(std::uint64_t m, unsigned k, std::uint64_t seed)
    : m_(m), k_(k), seed_(seed), words_((m + 63) / 64, 0) {
    if (k < 1 || k > kMaxHashes) {
        throw InvalidArgument("BloomFilter: k must lie in [1, 64], got " + std::to_string(k));
    }
}

void BloomFilter::insert_hash(Hash128 h, unsigned probes) {
    ++n_inserted_;
    if (m_ == 0) return;
    for (unsigned j = 0; j < probes; ++j) {
        std::uint64_t bit = probe(h, j);
        words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    }
}

bool BloomFilter::contains_hash(Hash128 h, unsigned probes) const {
    if (m_ == 0) return true;
    for (unsigned j = 0; j < probes; ++j) {
        std::uint64_t bit = probe(h, j);
        if ((words_[bit >> 6] & (std::uint64_t{1} << (bit & 63))) == 0) return false;
    }
    return true;
}

std::uint64_t BloomFilter::popcount() const {
    std::uint64_t total = 0;
    for (auto w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
}

std::vector<std::uint8_t> BloomFilter::serialize() const {
    ByteWriter out;
    out.put_tag({kMagic, 4});
    out.put<std::uint16_t>(kVersion);
    out.put<std::uint64_t>(m_);
    out.put<std::uint16_t>(static_cast<std::uint16_t>(k_));
    out.put<std::uint64_t>(seed_);
    const std::uint64_t nbytes = (m_ + 7) / 8;
    for (std::uint64_t i = 0; i < nbytes; ++i) {
        out.put<std::uint8_t>(static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8))));
    }
    return std::move(out).take();
}

BloomFilter BloomFilter::deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    in.expect_tag({kMagic, 4});
    auto version = in.get<std::uint16_t>();
    if (version != kVersion) throw ParseError("unsupported Bloom filter version " + std::to_string(version));
    auto m = in.get<std::uint64_t>();
    auto k = in.get<std::uint16_t>();
    auto seed = in.get<std::uint64_t>();
    if (k == 0 || k > kMaxHashes) throw ParseError("Bloom filter: hash count out of range");
    if (m / 8 > in.remaining()) throw ParseError("truncated input");
    BloomFilter f(m, k, seed);
    auto raw = in.get_bytes(static_cast<std::size_t>((m + 7) / 8));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        f.words_[i / 8] |= std::uint64_t{raw[i]} << (8 * (i % 8));
    }
    if (m % 64 != 0 && !f.words_.empty() && (f.words_.back() >> (m % 64)) != 0) {
        throw ParseError("Bloom filter padding bits are set");
    }
    if (!in.at_end()) throw ParseError("Bloom filter: trailing bytes");
    // The insert count is not part of the format; keep the smallest count
    // consistent with the observed fill.
    f.n_inserted_ = (f.popcount() + k - 1) / k;
    return f;
}

}  // namespace lbf
