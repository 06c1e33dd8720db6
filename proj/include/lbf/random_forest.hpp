#pragma once

#include <cstdint>
#include <vector>

#include "lbf/classifier.hpp"

namespace lbf {

// Tree nodes are stored in pre-order: an internal node's left child is the
// next node and `right` indexes the right child. x goes left when
// x[feature] <= threshold.
struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;
    std::int32_t feature = kLeaf;
    double threshold = 0.0;
    std::uint32_t right = 0;
    std::uint8_t leaf_class = 0;

    bool is_leaf() const { return feature == kLeaf; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int predict(std::span<const double> x) const;
};

// score(x) = (trees voting 1) / t.
// Payload: u32 t, then per tree u32 node count and node records, either
// leaf {u8 1 + class} or internal {u8 0, u32 feature, f64 threshold, u32 right}.
class RfModel final : public Classifier {
public:
    RfModel(std::size_t q, std::vector<DecisionTree> trees, std::size_t min_leaf = 1);

    ClassifierKind kind() const override { return ClassifierKind::rf; }
    std::size_t dimension() const override { return q_; }
    std::string name() const override { return "RF-" + std::to_string(trees_.size()); }

    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::size_t min_leaf() const { return min_leaf_; }
    std::size_t node_count() const;

    static std::shared_ptr<RfModel> decode_payload(ByteReader& in, std::size_t q);

protected:
    double score_unchecked(std::span<const double> x) const override;
    void encode_payload(ByteWriter& out) const override;

private:
    std::size_t q_;
    std::vector<DecisionTree> trees_;
    std::size_t min_leaf_;
};

struct RfOptions {
    std::size_t trees = 10;
    // A node holding at most this many samples becomes a leaf.
    std::size_t min_leaf = 1;
    bool imbalance_aware = false;
    std::uint64_t seed = 0;
};

// Indices of an N-sized bootstrap drawn with replacement: uniformly, or with
// probability 1/(2|D+|) per positive and 1/(2|D-|) per negative.
std::vector<std::size_t> bootstrap_sample(const LabeledDataset& data, bool imbalance_aware, std::uint64_t seed);

// CART trees grown on Gini gain over ceil(sqrt(q)) randomly chosen features.
std::shared_ptr<RfModel> train_rf(const LabeledDataset& data, const RfOptions& options);

}  // namespace lbf
