#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace neuralrank::detail {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads, in contiguous chunks.
/// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(std::int64_t n, unsigned jobs, Fn&& fn) {
    const auto workers = static_cast<std::int64_t>(std::max(1u, jobs));
    if (workers == 1 || n < 2) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::int64_t count = std::min(workers, n);
    const std::int64_t chunk = (n + count - 1) / count;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(static_cast<std::size_t>(count));
        for (std::int64_t w = 0; w < count; ++w) {
            threads.emplace_back([&, w] {
                const std::int64_t begin = w * chunk;
                const std::int64_t end = std::min(n, begin + chunk);
                try {
                    for (std::int64_t i = begin; i < end; ++i) fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace neuralrank::detail
