#pragma once

#include <cstdint>
#include <span>

namespace lbf {

// Mann-Whitney AUC; tied scores across a positive/negative pair count 1/2.
// Throws UndefinedMetric unless both labels occur.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Average precision: sum over distinct score thresholds (descending) of
// (recall_i - recall_{i-1}) * precision_i. Tied scores form one threshold.
// Throws UndefinedMetric when there are no positives.
double auprc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace lbf
