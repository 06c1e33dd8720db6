#include "lbf/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbf/error.hpp"
#include "lbf/random.hpp"

namespace lbf {

int DecisionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& node = nodes[i];
        i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? i + 1 : node.right;
    }
    return nodes[i].leaf_class;
}

RfModel::RfModel(std::size_t q, std::vector<DecisionTree> trees, std::size_t min_leaf)
    : q_(q), trees_(std::move(trees)), min_leaf_(min_leaf) {
    if (trees_.empty()) throw InvalidArgument("RfModel: need at least one tree");
    for (const auto& t : trees_) {
        if (t.nodes.empty()) throw InvalidArgument("RfModel: empty tree");
    }
}

std::size_t RfModel::node_count() const {
    std::size_t n = 0;
    for (const auto& t : trees_) n += t.nodes.size();
    return n;
}

double RfModel::score_unchecked(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees_) votes += static_cast<std::size_t>(t.predict(x));
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

void RfModel::encode_payload(ByteWriter& out) const {
    out.put<std::uint32_t>(static_cast<std::uint32_t>(trees_.size()));
    for (const auto& tree : trees_) {
        out.put<std::uint32_t>(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) {
                out.put<std::uint8_t>(1);
                out.put<std::uint8_t>(node.leaf_class);
            } else {
                out.put<std::uint8_t>(0);
                out.put<std::uint32_t>(static_cast<std::uint32_t>(node.feature));
                out.put<double>(node.threshold);
                out.put<std::uint32_t>(node.right);
            }
        }
    }
}

std::shared_ptr<RfModel> RfModel::decode_payload(ByteReader& in, std::size_t q) {
    auto t = in.get<std::uint32_t>();
    std::vector<DecisionTree> trees(t);
    for (auto& tree : trees) {
        auto count = in.get<std::uint32_t>();
        if (count == 0 || count > in.remaining()) throw ParseError("RF encoding: bad node count");
        tree.nodes.resize(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            auto& node = tree.nodes[i];
            if (in.get<std::uint8_t>() == 1) {
                node.leaf_class = in.get<std::uint8_t>() ? 1 : 0;
                continue;
            }
            auto feature = in.get<std::uint32_t>();
            node.threshold = in.get<double>();
            node.right = in.get<std::uint32_t>();
            if (feature >= q || i + 1 >= count || node.right <= i || node.right >= count) {
                throw ParseError("RF encoding: node references out of range");
            }
            node.feature = static_cast<std::int32_t>(feature);
        }
    }
    return std::make_shared<RfModel>(q, std::move(trees));
}

std::vector<std::size_t> bootstrap_sample(const LabeledDataset& data, bool imbalance_aware, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = data.size();
    std::vector<std::size_t> out(n);
    if (!imbalance_aware) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& i : out) i = pick(rng);
        return out;
    }
    // Each class carries total probability 1/2, uniform within the class.
    const auto pos = data.indices_with_label(1);
    const auto neg = data.indices_with_label(0);
    if (pos.empty() || neg.empty()) throw DegenerateData("bootstrap_sample: both classes required");
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<std::size_t> pick_pos(0, pos.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_neg(0, neg.size() - 1);
    for (auto& i : out) i = coin(rng) ? pos[pick_pos(rng)] : neg[pick_neg(rng)];
    return out;
}

namespace {

double gini(double pos, double total) {
    if (total <= 0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

class TreeGrower {
public:
    TreeGrower(const LabeledDataset& data, std::size_t min_leaf, std::uint64_t seed)
        : data_(data), min_leaf_(min_leaf), rng_(seed),
          features_per_split_(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(data.dimension()))))) {
        feature_order_.resize(data.dimension());
        std::iota(feature_order_.begin(), feature_order_.end(), 0);
    }

    DecisionTree grow(std::vector<std::size_t> samples) {
        DecisionTree tree;
        grow_node(tree, samples);
        return tree;
    }

private:
    struct Split {
        std::int32_t feature = TreeNode::kLeaf;
        double threshold = 0.0;
        double gain = 0.0;
    };

    std::size_t positives(const std::vector<std::size_t>& samples) const {
        std::size_t pos = 0;
        for (auto i : samples) pos += static_cast<std::size_t>(data_.label(i));
        return pos;
    }

    void make_leaf(DecisionTree& tree, std::size_t pos, std::size_t total) {
        TreeNode leaf;
        leaf.leaf_class = 2 * pos >= total ? 1 : 0;
        tree.nodes.push_back(leaf);
    }

    Split best_split(const std::vector<std::size_t>& samples, std::size_t pos) {
        const double total = static_cast<double>(samples.size());
        const double parent = gini(static_cast<double>(pos), total);
        Split best;

        // Partial Fisher-Yates: the first features_per_split_ entries form a
        // uniform random subset.
        for (std::size_t f = 0; f < features_per_split_; ++f) {
            std::uniform_int_distribution<std::size_t> pick(f, feature_order_.size() - 1);
            std::swap(feature_order_[f], feature_order_[pick(rng_)]);
        }

        for (std::size_t f = 0; f < features_per_split_; ++f) {
            const auto feature = feature_order_[f];
            values_.clear();
            for (auto i : samples) values_.emplace_back(data_.row(i)[feature], data_.label(i));
            std::sort(values_.begin(), values_.end());
            double left_pos = 0;
            for (std::size_t s = 0; s + 1 < values_.size(); ++s) {
                left_pos += values_[s].second;
                if (values_[s].first == values_[s + 1].first) continue;
                const double left_n = static_cast<double>(s + 1);
                const double right_n = total - left_n;
                const double right_pos = static_cast<double>(pos) - left_pos;
                const double child = (left_n / total) * gini(left_pos, left_n) + (right_n / total) * gini(right_pos, right_n);
                const double gain = parent - child;
                if (gain > best.gain + 1e-12) {
                    best.gain = gain;
                    best.feature = static_cast<std::int32_t>(feature);
                    best.threshold = values_[s].first + (values_[s + 1].first - values_[s].first) / 2;
                    // Midpoint can round up onto the right value for adjacent doubles.
                    if (!(best.threshold < values_[s + 1].first)) best.threshold = values_[s].first;
                }
            }
        }
        return best;
    }

    void grow_node(DecisionTree& tree, std::vector<std::size_t>& samples) {
        const std::size_t pos = positives(samples);
        if (samples.size() <= min_leaf_ || pos == 0 || pos == samples.size()) {
            make_leaf(tree, pos, samples.size());
            return;
        }
        const Split split = best_split(samples, pos);
        if (split.feature == TreeNode::kLeaf) {
            make_leaf(tree, pos, samples.size());
            return;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto i : samples) {
            (data_.row(i)[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);
        }
        samples.clear();
        samples.shrink_to_fit();

        const std::size_t index = tree.nodes.size();
        TreeNode node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        tree.nodes.push_back(node);
        grow_node(tree, left);
        tree.nodes[index].right = static_cast<std::uint32_t>(tree.nodes.size());
        grow_node(tree, right);
    }

    const LabeledDataset& data_;
    std::size_t min_leaf_;
    Rng rng_;
    std::size_t features_per_split_;
    std::vector<std::size_t> feature_order_;
    std::vector<std::pair<double, int>> values_;
};

}  // namespace

std::shared_ptr<RfModel> train_rf(const LabeledDataset& data, const RfOptions& options) {
    if (options.trees == 0) throw InvalidArgument("train_rf: t must be >= 1");
    if (options.min_leaf == 0) throw InvalidArgument("train_rf: delta must be >= 1");
    data.validate();
    require_both_classes(data, "train_rf");

    std::vector<DecisionTree> trees;
    trees.reserve(options.trees);
    for (std::size_t t = 0; t < options.trees; ++t) {
        auto samples = bootstrap_sample(data, options.imbalance_aware, mix_seed(options.seed, 2 * t));
        TreeGrower grower(data, options.min_leaf, mix_seed(options.seed, 2 * t + 1));
        trees.push_back(grower.grow(std::move(samples)));
    }
    return std::make_shared<RfModel>(data.dimension(), std::move(trees), options.min_leaf);
}

}  // namespace lbf
