#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pitspec {

/// Resolves a worker count; 0 means one per hardware thread.
[[nodiscard]] inline std::size_t resolve_workers(std::size_t workers) noexcept {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return workers;
}

/**
 * @brief Runs task(i) for i in [0, count) on up to `workers` threads.
 *
 * Tasks pull indices from a shared counter, so results must be written to
 * index-addressed slots to stay independent of scheduling. The first exception
 * thrown by a task is rethrown after all workers join.
 */
template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
    workers = std::min(resolve_workers(workers), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace pitspec
