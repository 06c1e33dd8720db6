#pragma once

#include <cmath>
#include <vector>

#include "lbf/dataset.hpp"

namespace lbf::detail {

// Per-feature affine map z = (x - mean) / scale. Constant features keep
// scale 1 so the map stays invertible.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const LabeledDataset& data) {
        const std::size_t q = data.dimension();
        const double n = static_cast<double>(data.size());
        Standardizer s{std::vector<double>(q, 0.0), std::vector<double>(q, 0.0)};
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto r = data.row(i);
            for (std::size_t j = 0; j < q; ++j) s.mean[j] += r[j];
        }
        for (auto& m : s.mean) m /= n;
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto r = data.row(i);
            for (std::size_t j = 0; j < q; ++j) s.scale[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
        }
        for (auto& v : s.scale) {
            v = std::sqrt(v / n);
            if (!(v > 1e-12)) v = 1.0;
        }
        return s;
    }

    // Row-major standardized copy of the features.
    std::vector<double> apply(const LabeledDataset& data) const {
        const std::size_t q = data.dimension();
        std::vector<double> out(data.size() * q);
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto r = data.row(i);
            for (std::size_t j = 0; j < q; ++j) out[i * q + j] = (r[j] - mean[j]) / scale[j];
        }
        return out;
    }
};

}  // namespace lbf::detail
