#pragma once

#include <cstddef>
#include <iterator>

#include "lbf/error.hpp"

namespace lbf {

template <typename Filter, typename Rows>
double empirical_fpr(const Filter& filter, const Rows& non_keys) {
    std::size_t total = 0;
    std::size_t accepted = 0;
    for (const auto& x : non_keys) {
        ++total;
        if (filter.contains(FeatureView(x))) ++accepted;
    }
    if (total == 0) throw InvalidArgument("empirical_fpr: empty non-key set");
    return static_cast<double>(accepted) / static_cast<double>(total);
}

}  // namespace lbf
