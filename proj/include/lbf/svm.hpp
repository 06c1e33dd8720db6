#pragma once

#include <cstdint>
#include <vector>

#include "lbf/classifier.hpp"

namespace lbf {

// Linear SVM scored through a sigmoid: score(x) = sigmoid(w.x + b).
// Payload: q doubles of w followed by b.
class SvmModel final : public Classifier {
public:
    SvmModel(std::vector<double> w, double b, double c = 1.0);

    ClassifierKind kind() const override { return ClassifierKind::svm; }
    std::size_t dimension() const override { return w_.size(); }
    std::string name() const override { return "SVM"; }

    double decision(std::span<const double> x) const;
    const std::vector<double>& weights() const { return w_; }
    double bias() const { return b_; }
    double c() const { return c_; }

    static std::shared_ptr<SvmModel> decode_payload(ByteReader& in, std::size_t q);

protected:
    double score_unchecked(std::span<const double> x) const override { return sigmoid(decision(x)); }
    void encode_payload(ByteWriter& out) const override;

private:
    std::vector<double> w_;
    double b_;
    double c_;
};

struct SvmOptions {
    double c = 1.0;
    bool cost_sensitive = false;
    std::uint64_t seed = 0;
    // Passes of dual coordinate descent; 0 returns the w = 0, b = 0 model.
    std::size_t max_epochs = 300;
    // Stop when the projected-gradient spread drops below this.
    double tolerance = 1e-3;
};

// Soft-margin linear SVM, min 1/2 |w|^2 + c * sum_x cost_x * xi_x, solved in
// the dual by coordinate descent on standardized features. The bias is
// learned as the weight of a constant feature. With cost_sensitive the slack
// of positive examples costs |D-|/|D+| times more.
std::shared_ptr<SvmModel> train_svm(const LabeledDataset& data, const SvmOptions& options);

}  // namespace lbf
