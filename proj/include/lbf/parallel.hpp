#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lbf {

// Evaluates fn(0..n-1) on up to `workers` threads. Results land at their own
// index, so the output never depends on completion order. The first
// exception thrown by any task is rethrown.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, std::size_t workers, Fn fn) {
    std::vector<Result> out(n);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(run);
    pool.clear();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace lbf
