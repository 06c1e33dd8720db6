#include "lbf/neural_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbf/error.hpp"
#include "lbf/random.hpp"
#include "standardize.hpp"

namespace lbf {
namespace {

// Binary cross-entropy of a sigmoid unit written on the logit, stable for
// large |z|: log(1 + e^z) - y z.
double bce_from_logit(double z, int y) {
    double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - (y == 1 ? z : 0.0);
}

struct Activations {
    // a[0] is the input; a[l+1] the output of layer l (post-ReLU for hidden
    // layers, the logit for the output layer).
    std::vector<std::vector<double>> a;
};

void forward(const std::vector<DenseLayer>& layers, std::span<const double> x, Activations& act) {
    act.a.resize(layers.size() + 1);
    act.a[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        auto& out = act.a[l + 1];
        out.assign(layer.outputs, 0.0);
        const auto& in = act.a[l];
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            double z = layer.bias[o];
            const double* w = &layer.weights[o * layer.inputs];
            for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * in[i];
            out[o] = (l + 1 < layers.size()) ? std::max(z, 0.0) : z;
        }
    }
}

std::size_t count_params(const std::vector<DenseLayer>& layers) {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

}  // namespace

NnModel::NnModel(std::size_t q, std::vector<DenseLayer> layers, double lr)
    : q_(q), layers_(std::move(layers)), lr_(lr) {
    if (layers_.size() < 2) throw InvalidArgument("NnModel: need at least one hidden layer");
    std::size_t expected_in = q_;
    for (const auto& l : layers_) {
        if (l.inputs != expected_in || l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs ||
            l.outputs == 0) {
            throw InvalidArgument("NnModel: inconsistent layer shapes");
        }
        expected_in = l.outputs;
    }
    if (layers_.back().outputs != 1) throw InvalidArgument("NnModel: output layer must have one unit");
}

std::string NnModel::name() const {
    std::string s = "NN-";
    auto hidden = hidden_sizes();
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(hidden[i]);
    }
    return s;
}

std::vector<std::size_t> NnModel::hidden_sizes() const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) out.push_back(layers_[l].outputs);
    return out;
}

std::size_t NnModel::parameter_count() const { return count_params(layers_); }

std::vector<double> NnModel::parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers_) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void NnModel::set_parameters(std::span<const double> params) {
    if (params.size() != parameter_count()) throw InvalidArgument("set_parameters: wrong parameter count");
    std::size_t pos = 0;
    for (auto& l : layers_) {
        std::copy_n(params.begin() + pos, l.weights.size(), l.weights.begin());
        pos += l.weights.size();
        std::copy_n(params.begin() + pos, l.bias.size(), l.bias.begin());
        pos += l.bias.size();
    }
}

double NnModel::logit(std::span<const double> x) const {
    Activations act;
    forward(layers_, x, act);
    return act.a.back()[0];
}

void NnModel::encode_payload(ByteWriter& out) const {
    auto hidden = hidden_sizes();
    out.put<std::uint32_t>(static_cast<std::uint32_t>(hidden.size()));
    for (auto h : hidden) out.put<std::uint32_t>(static_cast<std::uint32_t>(h));
    for (double p : parameters()) out.put<double>(p);
}

std::shared_ptr<NnModel> NnModel::decode_payload(ByteReader& in, std::size_t q) {
    auto count = in.get<std::uint32_t>();
    if (count == 0 || count > 1024) throw ParseError("NN encoding: bad hidden-layer count");
    std::vector<std::size_t> widths;
    for (std::uint32_t i = 0; i < count; ++i) widths.push_back(in.get<std::uint32_t>());
    widths.push_back(1);
    std::vector<DenseLayer> layers;
    std::size_t inputs = q;
    for (auto w : widths) {
        DenseLayer l{inputs, w, std::vector<double>(inputs * w), std::vector<double>(w)};
        for (auto& v : l.weights) v = in.get<double>();
        for (auto& v : l.bias) v = in.get<double>();
        layers.push_back(std::move(l));
        inputs = w;
    }
    return std::make_shared<NnModel>(q, std::move(layers));
}

NnModel make_nn(std::size_t q, const std::vector<std::size_t>& hidden, std::uint64_t seed, double lr) {
    if (hidden.empty()) throw InvalidArgument("make_nn: layer_sizes must be non-empty");
    if (q == 0) throw InvalidArgument("make_nn: zero input dimension");
    Rng rng(seed);
    std::vector<DenseLayer> layers;
    std::size_t inputs = q;
    auto widths = hidden;
    widths.push_back(1);
    for (std::size_t l = 0; l < widths.size(); ++l) {
        if (widths[l] == 0) throw InvalidArgument("make_nn: zero-width layer");
        const bool output = l + 1 == widths.size();
        // He init feeding ReLUs, Xavier for the sigmoid output.
        std::normal_distribution<double> dist(0.0, std::sqrt((output ? 1.0 : 2.0) / static_cast<double>(inputs)));
        DenseLayer layer{inputs, widths[l], std::vector<double>(inputs * widths[l]), std::vector<double>(widths[l], 0.0)};
        for (auto& w : layer.weights) w = dist(rng);
        layers.push_back(std::move(layer));
        inputs = widths[l];
    }
    return NnModel(q, std::move(layers), lr);
}

std::pair<double, std::vector<double>> nn_loss_and_gradient(const NnModel& model, const RowList& rows,
                                                            std::span<const std::uint8_t> labels,
                                                            std::span<const double> sample_weights) {
    if (rows.empty() || rows.size() != labels.size() || rows.size() != sample_weights.size()) {
        throw InvalidArgument("nn_loss_and_gradient: rows, labels and weights must be non-empty and aligned");
    }
    const auto& layers = model.layers();
    std::vector<double> grad(model.parameter_count(), 0.0);
    std::vector<std::size_t> offset(layers.size());
    for (std::size_t l = 0, pos = 0; l < layers.size(); ++l) {
        offset[l] = pos;
        pos += layers[l].weights.size() + layers[l].bias.size();
    }

    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    Activations act;
    std::vector<double> delta;
    std::vector<double> prev_delta;
    for (std::size_t s = 0; s < rows.size(); ++s) {
        if (rows[s].size() != model.dimension()) throw InvalidArgument("nn_loss_and_gradient: dimension mismatch");
        forward(layers, rows[s], act);
        const double z = act.a.back()[0];
        const double weight = sample_weights[s] * inv_n;
        loss += weight * bce_from_logit(z, labels[s]);

        delta.assign(1, weight * (sigmoid(z) - (labels[s] == 1 ? 1.0 : 0.0)));
        for (std::size_t l = layers.size(); l-- > 0;) {
            const auto& layer = layers[l];
            const auto& in = act.a[l];
            double* gw = &grad[offset[l]];
            double* gb = gw + layer.weights.size();
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                if (delta[o] == 0.0) continue;
                for (std::size_t i = 0; i < layer.inputs; ++i) gw[o * layer.inputs + i] += delta[o] * in[i];
                gb[o] += delta[o];
            }
            if (l == 0) break;
            prev_delta.assign(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                if (delta[o] == 0.0) continue;
                for (std::size_t i = 0; i < layer.inputs; ++i) {
                    prev_delta[i] += delta[o] * layer.weights[o * layer.inputs + i];
                }
            }
            // ReLU derivative, taken as 0 at the kink.
            for (std::size_t i = 0; i < layer.inputs; ++i) {
                if (in[i] <= 0.0) prev_delta[i] = 0.0;
            }
            std::swap(delta, prev_delta);
        }
    }
    return {loss, std::move(grad)};
}

std::shared_ptr<NnModel> train_nn(const LabeledDataset& data, const NnOptions& options) {
    if (options.hidden.empty()) throw InvalidArgument("train_nn: layer_sizes must be non-empty");
    if (!(options.lr > 0.0)) throw InvalidArgument("train_nn: lr must be positive");
    if (options.batch_size == 0) throw InvalidArgument("train_nn: batch size must be positive");
    data.validate();
    require_both_classes(data, "train_nn");

    const std::size_t n = data.size();
    const std::size_t q = data.dimension();
    NnModel model = make_nn(q, options.hidden, mix_seed(options.seed, 1), options.lr);
    if (options.epochs == 0) return std::make_shared<NnModel>(model);

    const auto standardizer = detail::Standardizer::fit(data);
    const auto z = standardizer.apply(data);
    const double pos_weight = options.cost_sensitive ? positive_class_weight(data) : 1.0;

    auto params = model.parameters();
    std::vector<double> m1(params.size(), 0.0);
    std::vector<double> m2(params.size(), 0.0);
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    double beta1_pow = 1.0;
    double beta2_pow = 1.0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(options.seed, 2));

    RowList batch_rows;
    std::vector<std::uint8_t> batch_labels;
    std::vector<double> batch_weights;
    std::vector<double> epoch_losses;

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += options.batch_size) {
            const std::size_t end = std::min(n, start + options.batch_size);
            batch_rows.clear();
            batch_labels.clear();
            batch_weights.clear();
            for (std::size_t s = start; s < end; ++s) {
                const auto i = order[s];
                batch_rows.emplace_back(&z[i * q], q);
                batch_labels.push_back(static_cast<std::uint8_t>(data.label(i)));
                batch_weights.push_back(data.label(i) == 1 ? pos_weight : 1.0);
            }
            model.set_parameters(params);
            auto [loss, grad] = nn_loss_and_gradient(model, batch_rows, batch_labels, batch_weights);
            epoch_loss += loss * static_cast<double>(end - start);

            beta1_pow *= kBeta1;
            beta2_pow *= kBeta2;
            for (std::size_t p = 0; p < params.size(); ++p) {
                m1[p] = kBeta1 * m1[p] + (1 - kBeta1) * grad[p];
                m2[p] = kBeta2 * m2[p] + (1 - kBeta2) * grad[p] * grad[p];
                const double mhat = m1[p] / (1 - beta1_pow);
                const double vhat = m2[p] / (1 - beta2_pow);
                params[p] -= options.lr * mhat / (std::sqrt(vhat) + kEps);
            }
        }
        epoch_losses.push_back(epoch_loss / static_cast<double>(n));
        if (epoch_losses.size() > options.patience) {
            const double before = epoch_losses[epoch_losses.size() - 1 - options.patience];
            const double now = epoch_losses.back();
            if ((before - now) < options.plateau_tolerance * std::abs(before)) break;
        }
    }
    model.set_parameters(params);

    // Fold the input standardization into the first layer.
    auto layers = model.layers();
    auto& first = layers.front();
    for (std::size_t o = 0; o < first.outputs; ++o) {
        for (std::size_t i = 0; i < first.inputs; ++i) {
            double& w = first.weights[o * first.inputs + i];
            w /= standardizer.scale[i];
            first.bias[o] -= w * standardizer.mean[i];
        }
    }
    return std::make_shared<NnModel>(q, std::move(layers), options.lr);
}

}  // namespace lbf
