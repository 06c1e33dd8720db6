#include "lbf/classifier.hpp"

#include "lbf/error.hpp"
#include "lbf/neural_net.hpp"
#include "lbf/random_forest.hpp"
#include "lbf/svm.hpp"

namespace lbf {
namespace {
constexpr char kMagic[] = "LBFC";
constexpr std::uint16_t kVersion = 1;
}  // namespace

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::nn: return "nn";
        case ClassifierKind::rf: return "rf";
    }
    return "unknown";
}

ClassifierKind parse_classifier_kind(const std::string& name) {
    if (name == "svm") return ClassifierKind::svm;
    if (name == "nn") return ClassifierKind::nn;
    if (name == "rf") return ClassifierKind::rf;
    throw InvalidArgument("unknown classifier kind '" + name + "' (expected svm, nn or rf)");
}

double Classifier::score(std::span<const double> x) const {
    if (x.size() != dimension()) {
        throw InvalidArgument("score: expected " + std::to_string(dimension()) + " features, got " +
                              std::to_string(x.size()));
    }
    return score_unchecked(x);
}

std::vector<double> Classifier::score_all(const RowList& rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (auto row : rows) out.push_back(score(row));
    return out;
}

std::vector<double> Classifier::score_all(const LabeledDataset& data) const {
    std::vector<double> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(score(data.row(i)));
    return out;
}

std::vector<std::uint8_t> Classifier::encode() const {
    ByteWriter out;
    out.put_tag({kMagic, 4});
    out.put<std::uint16_t>(kVersion);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(kind()));
    out.put<std::uint32_t>(static_cast<std::uint32_t>(dimension()));
    encode_payload(out);
    return std::move(out).take();
}

ClassifierPtr decode_classifier(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    in.expect_tag({kMagic, 4});
    auto version = in.get<std::uint16_t>();
    if (version != kVersion) throw ParseError("unsupported classifier encoding version " + std::to_string(version));
    auto kind = in.get<std::uint8_t>();
    auto q = in.get<std::uint32_t>();
    ClassifierPtr model;
    switch (static_cast<ClassifierKind>(kind)) {
        case ClassifierKind::svm: model = SvmModel::decode_payload(in, q); break;
        case ClassifierKind::nn: model = NnModel::decode_payload(in, q); break;
        case ClassifierKind::rf: model = RfModel::decode_payload(in, q); break;
        default: throw ParseError("unknown classifier kind tag " + std::to_string(kind));
    }
    if (!in.at_end()) throw ParseError("trailing bytes after classifier encoding");
    return model;
}

void require_both_classes(const LabeledDataset& data, const char* who) {
    auto pos = data.count_positive();
    if (pos == 0 || pos == data.size()) {
        throw DegenerateData(std::string(who) + ": training data must contain both classes");
    }
}

double positive_class_weight(const LabeledDataset& data) {
    auto pos = data.count_positive();
    return static_cast<double>(data.size() - pos) / static_cast<double>(pos);
}

}  // namespace lbf
