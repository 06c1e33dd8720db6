#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lbf/byte_io.hpp"
#include "lbf/dataset.hpp"

namespace lbf {

enum class ClassifierKind : std::uint8_t { svm = 1, nn = 2, rf = 3 };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& name);

// A trained scorer C: R^q -> [0, 1]; higher means "more likely a key".
//
// Every model has a canonical binary encoding, used both for persistence and
// for space accounting:
//
//   "LBFC" | version u16 | kind u8 | q u32 | kind-specific payload
//
// All multi-byte fields are little-endian and all reals are IEEE-754 binary64.
class Classifier {
public:
    static constexpr std::size_t kHeaderBytes = 4 + 2 + 1 + 4;

    virtual ~Classifier() = default;

    virtual ClassifierKind kind() const = 0;
    virtual std::size_t dimension() const = 0;
    // Short label in the usual notation: "SVM", "NN-150,50", "RF-10".
    virtual std::string name() const = 0;

    // Throws InvalidArgument when x does not have dimension() features.
    double score(std::span<const double> x) const;
    std::vector<double> score_all(const RowList& rows) const;
    std::vector<double> score_all(const LabeledDataset& data) const;

    std::vector<std::uint8_t> encode() const;
    std::uint64_t size_bits() const { return 8 * encode().size(); }

protected:
    virtual double score_unchecked(std::span<const double> x) const = 0;
    virtual void encode_payload(ByteWriter& out) const = 0;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

ClassifierPtr decode_classifier(std::span<const std::uint8_t> bytes);

inline double sigmoid(double z) {
    // Split on sign so exp never overflows.
    if (z >= 0) {
        double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Throws DegenerateData unless both labels occur.
void require_both_classes(const LabeledDataset& data, const char* who);

// |D-| / |D+|: the weight given to positive examples by the cost-sensitive
// training modes.
double positive_class_weight(const LabeledDataset& data);

}  // namespace lbf
