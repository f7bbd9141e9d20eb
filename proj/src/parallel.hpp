#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kpsa::detail {

// Runs fn(i) for i in [0, count) across up to `threads` workers (0 = hardware
// concurrency) in contiguous blocks of at least `grain` indices. Callers keep
// results deterministic by writing to disjoint per-index slots; no ordering
// across workers is guaranteed. The first exception thrown by any worker is
// rethrown after all join.
template <typename Fn>
void parallel_for(std::size_t count, int threads, std::size_t grain, Fn&& fn) {
    if (count == 0) return;
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    if (grain == 0) grain = 1;
    workers = std::min(workers, (count + grain - 1) / grain);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = count * w / workers;
        std::size_t end = count * (w + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace kpsa::detail
