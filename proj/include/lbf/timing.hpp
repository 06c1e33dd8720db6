#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <vector>

#include "lbf/error.hpp"

namespace lbf {

struct TimingOptions {
    std::size_t repeats = 5;
    std::size_t min_batch = 10'000;  // queries per measurement
};

// Signed percentage of `time` relative to `baseline`; positive means slower.
inline double percent_vs_baseline(double time, double baseline) {
    if (!(baseline > 0)) throw InvalidArgument("percent_vs_baseline: baseline must be positive");
    return 100.0 * (time - baseline) / baseline;
}

// Median seconds per query over `repeats` timed passes of `query` across
// `rows`, after one untimed warm-up pass. Short inputs are cycled so that
// every timed batch holds at least min_batch queries.
template <typename Query, typename Rows>
double reject_time(Query&& query, const Rows& rows, const TimingOptions& options = {}) {
    if (rows.empty()) throw InvalidArgument("reject_time: empty query set");
    if (options.repeats < 3) throw InvalidArgument("reject_time: need at least 3 repeats");
    const std::size_t batch = std::max(options.min_batch, static_cast<std::size_t>(rows.size()));

    std::size_t sink = 0;
    auto pass = [&] {
        for (std::size_t i = 0; i < batch; ++i) sink += query(rows[i % rows.size()]) ? 1 : 0;
    };
    pass();

    std::vector<double> samples;
    for (std::size_t r = 0; r < options.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        pass();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        samples.push_back(elapsed.count() / static_cast<double>(batch));
    }
    // Keeps the query results observable so the loop is not optimized away.
    volatile std::size_t keep = sink;
    (void)keep;

    std::sort(samples.begin(), samples.end());
    const std::size_t mid = samples.size() / 2;
    return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

}  // namespace lbf
