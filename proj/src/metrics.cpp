#include "lbf/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "lbf/error.hpp"

namespace lbf {
namespace {

void check_aligned(std::span<const double> scores, std::span<const std::uint8_t> labels, const char* who) {
    if (scores.size() != labels.size()) {
        throw InvalidArgument(std::string(who) + ": scores and labels differ in length");
    }
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? scores[a] > scores[b] : scores[a] < scores[b];
    });
    return order;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_aligned(scores, labels, "auc");
    double n_pos = 0;
    for (auto y : labels) n_pos += (y == 1);
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw UndefinedMetric("auc: both classes must be present");

    const auto order = order_by_score(scores, false);
    // Sum of 1-based mid-ranks of the positives.
    double rank_sum = 0;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
        const double mid_rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t i = start; i < end; ++i) {
            if (labels[order[i]] == 1) rank_sum += mid_rank;
        }
        start = end;
    }
    const double u = rank_sum - n_pos * (n_pos + 1) / 2.0;
    return u / (n_pos * n_neg);
}

double auprc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_aligned(scores, labels, "auprc");
    double n_pos = 0;
    for (auto y : labels) n_pos += (y == 1);
    if (n_pos == 0) throw UndefinedMetric("auprc: no positive examples");

    const auto order = order_by_score(scores, true);
    double tp = 0;
    double seen = 0;
    double prev_recall = 0;
    double ap = 0;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start;
        while (end < order.size() && scores[order[end]] == scores[order[start]]) {
            tp += (labels[order[end]] == 1);
            ++end;
        }
        seen += static_cast<double>(end - start);
        const double recall = tp / n_pos;
        ap += (recall - prev_recall) * (tp / seen);
        prev_recall = recall;
        start = end;
    }
    return ap;
}

}  // namespace lbf
