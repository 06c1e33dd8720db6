#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lbf {

struct SyntheticProvenance {
    double a = 0.0;
    double r = 0.0;
    double rho = 1.0;
};

enum class ProvenanceKind { synthetic, url, dna, custom };

struct Provenance {
    ProvenanceKind kind = ProvenanceKind::custom;
    SyntheticProvenance synthetic{};
    std::string source;
};

std::string to_string(ProvenanceKind kind);

// Row-major N x q feature matrix with binary labels (1 = key).
class LabeledDataset {
public:
    LabeledDataset() = default;
    explicit LabeledDataset(std::size_t q) : q_(q) {}
    LabeledDataset(std::size_t q, std::vector<double> features, std::vector<std::uint8_t> labels,
                   Provenance provenance = {});

    void add(std::span<const double> row, int label);

    std::size_t size() const { return labels_.size(); }
    std::size_t dimension() const { return q_; }
    bool empty() const { return labels_.empty(); }

    std::span<const double> row(std::size_t i) const { return {features_.data() + i * q_, q_}; }
    int label(std::size_t i) const { return labels_[i]; }
    std::span<const std::uint8_t> labels() const { return labels_; }
    std::span<const double> features() const { return features_; }

    std::size_t count_positive() const;
    std::size_t count_negative() const { return size() - count_positive(); }

    LabeledDataset subset(std::span<const std::size_t> indices) const;
    std::vector<std::size_t> indices_with_label(int label) const;

    // Throws InvalidArgument unless N >= 1, labels are binary and every
    // feature is finite.
    void validate() const;

    const Provenance& provenance() const { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = std::move(p); }

private:
    std::size_t q_ = 0;
    std::vector<double> features_;
    std::vector<std::uint8_t> labels_;
    Provenance provenance_;
};

// Non-owning list of feature rows, the currency of filter construction.
using RowList = std::vector<std::span<const double>>;

RowList rows_with_label(const LabeledDataset& data, int label);
RowList all_rows(const LabeledDataset& data);

}  // namespace lbf
