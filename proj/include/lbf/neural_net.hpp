#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lbf/classifier.hpp"

namespace lbf {

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;     // outputs
};

// Feed-forward network with ReLU hidden units and one sigmoid output unit.
// Payload: u32 hidden-layer count, u32 width per hidden layer, then every
// layer's weights followed by its biases, input side first.
class NnModel final : public Classifier {
public:
    NnModel(std::size_t q, std::vector<DenseLayer> layers, double lr = 1e-3);

    ClassifierKind kind() const override { return ClassifierKind::nn; }
    std::size_t dimension() const override { return q_; }
    std::string name() const override;

    std::vector<std::size_t> hidden_sizes() const;
    const std::vector<DenseLayer>& layers() const { return layers_; }
    double learning_rate() const { return lr_; }
    std::size_t parameter_count() const;

    // Flattened in payload order.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

    // Output-unit pre-activation.
    double logit(std::span<const double> x) const;

    static std::shared_ptr<NnModel> decode_payload(ByteReader& in, std::size_t q);

protected:
    double score_unchecked(std::span<const double> x) const override { return sigmoid(logit(x)); }
    void encode_payload(ByteWriter& out) const override;

private:
    std::size_t q_;
    std::vector<DenseLayer> layers_;
    double lr_;
};

// Randomly initialized network (He-normal hidden layers, zero biases).
NnModel make_nn(std::size_t q, const std::vector<std::size_t>& hidden, std::uint64_t seed, double lr = 1e-3);

// Weighted mean binary cross-entropy over the rows and its gradient with
// respect to parameters(), by backpropagation.
std::pair<double, std::vector<double>> nn_loss_and_gradient(const NnModel& model, const RowList& rows,
                                                            std::span<const std::uint8_t> labels,
                                                            std::span<const double> sample_weights);

struct NnOptions {
    std::vector<std::size_t> hidden{25};
    double lr = 1e-3;
    bool cost_sensitive = false;
    std::uint64_t seed = 0;
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    // Early stop once the epoch loss improved by less than this (relative)
    // over the last `patience` epochs.
    double plateau_tolerance = 1e-5;
    std::size_t patience = 10;
};

// Mini-batch training with Adam steps on standardized inputs; the
// standardization is folded back into the first layer, so the returned model
// scores raw features.
std::shared_ptr<NnModel> train_nn(const LabeledDataset& data, const NnOptions& options);

}  // namespace lbf
