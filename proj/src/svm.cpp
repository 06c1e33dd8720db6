#include "lbf/svm.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "lbf/error.hpp"
#include "lbf/random.hpp"
#include "standardize.hpp"

namespace lbf {

SvmModel::SvmModel(std::vector<double> w, double b, double c) : w_(std::move(w)), b_(b), c_(c) {
    if (w_.empty()) throw InvalidArgument("SvmModel: empty weight vector");
}

double SvmModel::decision(std::span<const double> x) const {
    double z = b_;
    for (std::size_t j = 0; j < w_.size(); ++j) z += w_[j] * x[j];
    return z;
}

void SvmModel::encode_payload(ByteWriter& out) const {
    for (double v : w_) out.put<double>(v);
    out.put<double>(b_);
}

std::shared_ptr<SvmModel> SvmModel::decode_payload(ByteReader& in, std::size_t q) {
    std::vector<double> w(q);
    for (auto& v : w) v = in.get<double>();
    double b = in.get<double>();
    return std::make_shared<SvmModel>(std::move(w), b);
}

std::shared_ptr<SvmModel> train_svm(const LabeledDataset& data, const SvmOptions& options) {
    if (!(options.c > 0.0)) throw InvalidArgument("train_svm: c must be positive");
    data.validate();
    require_both_classes(data, "train_svm");

    const std::size_t n = data.size();
    const std::size_t q = data.dimension();
    if (options.max_epochs == 0) {
        return std::make_shared<SvmModel>(std::vector<double>(q, 0.0), 0.0, options.c);
    }

    const auto standardizer = detail::Standardizer::fit(data);
    const auto z = standardizer.apply(data);
    const std::size_t dim = q + 1;  // trailing constant feature carries the bias

    const double pos_cost = options.c * (options.cost_sensitive ? positive_class_weight(data) : 1.0);
    const double neg_cost = options.c;

    std::vector<double> w(dim, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> diag(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < q; ++j) diag[i] += z[i * q + j] * z[i * q + j];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(options.seed);

    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double pg_max = -std::numeric_limits<double>::infinity();
        double pg_min = std::numeric_limits<double>::infinity();
        for (auto i : order) {
            const double y = data.label(i) == 1 ? 1.0 : -1.0;
            const double upper = data.label(i) == 1 ? pos_cost : neg_cost;
            const double* zi = &z[i * q];

            double margin = w[q];
            for (std::size_t j = 0; j < q; ++j) margin += w[j] * zi[j];
            const double grad = y * margin - 1.0;

            double pg = grad;
            if (alpha[i] <= 0.0) {
                pg = std::min(grad, 0.0);
            } else if (alpha[i] >= upper) {
                pg = std::max(grad, 0.0);
            }
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (std::abs(pg) < 1e-12) continue;

            const double old = alpha[i];
            alpha[i] = std::clamp(old - grad / diag[i], 0.0, upper);
            const double step = (alpha[i] - old) * y;
            for (std::size_t j = 0; j < q; ++j) w[j] += step * zi[j];
            w[q] += step;
        }
        if (pg_max - pg_min < options.tolerance) break;
    }

    // Undo the standardization: w.z + b = (w/scale).x + (b - sum w*mean/scale).
    std::vector<double> raw(q);
    double bias = w[q];
    for (std::size_t j = 0; j < q; ++j) {
        raw[j] = w[j] / standardizer.scale[j];
        bias -= raw[j] * standardizer.mean[j];
    }
    return std::make_shared<SvmModel>(std::move(raw), bias, options.c);
}

}  // namespace lbf
