#include "lbf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lbf/error.hpp"

namespace lbf {

std::string to_string(ProvenanceKind kind) {
    switch (kind) {
        case ProvenanceKind::synthetic: return "synthetic";
        case ProvenanceKind::url: return "url";
        case ProvenanceKind::dna: return "dna";
        case ProvenanceKind::custom: return "custom";
    }
    return "custom";
}

LabeledDataset::LabeledDataset(std::size_t q, std::vector<double> features,
                               std::vector<std::uint8_t> labels, Provenance provenance)
    : q_(q), features_(std::move(features)), labels_(std::move(labels)), provenance_(std::move(provenance)) {
    if (q_ == 0 || features_.size() != labels_.size() * q_) {
        throw InvalidArgument("LabeledDataset: feature matrix does not match N x q");
    }
}

void LabeledDataset::add(std::span<const double> row, int label) {
    if (row.size() != q_) {
        throw InvalidArgument("LabeledDataset::add: expected " + std::to_string(q_) + " features, got " +
                              std::to_string(row.size()));
    }
    if (label != 0 && label != 1) throw InvalidArgument("LabeledDataset::add: label must be 0 or 1");
    features_.insert(features_.end(), row.begin(), row.end());
    labels_.push_back(static_cast<std::uint8_t>(label));
}

std::size_t LabeledDataset::count_positive() const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
    LabeledDataset out(q_);
    out.features_.reserve(indices.size() * q_);
    out.labels_.reserve(indices.size());
    for (auto i : indices) {
        auto r = row(i);
        out.features_.insert(out.features_.end(), r.begin(), r.end());
        out.labels_.push_back(labels_[i]);
    }
    out.provenance_ = provenance_;
    return out;
}

std::vector<std::size_t> LabeledDataset::indices_with_label(int label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) out.push_back(i);
    }
    return out;
}

void LabeledDataset::validate() const {
    if (labels_.empty()) throw InvalidArgument("dataset is empty");
    if (q_ == 0) throw InvalidArgument("dataset has zero features");
    for (auto y : labels_) {
        if (y > 1) throw InvalidArgument("dataset labels must be binary");
    }
    for (double v : features_) {
        if (!std::isfinite(v)) throw InvalidArgument("dataset contains a non-finite feature");
    }
}

RowList rows_with_label(const LabeledDataset& data, int label) {
    RowList out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.label(i) == label) out.push_back(data.row(i));
    }
    return out;
}

RowList all_rows(const LabeledDataset& data) {
    RowList out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(data.row(i));
    return out;
}

}  // namespace lbf
