#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace wmgf {

/// Resolves a thread-count request: 0 means "auto" (hardware concurrency).
inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, n) on up to `threads` worker threads.
/// Each index is processed exactly once; fn must write only to
/// index-private outputs so results are independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t n_workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&, w] {
            // Static block partition: worker w owns a contiguous range.
            const std::size_t lo = n * w / n_workers;
            const std::size_t hi = n * (w + 1) / n_workers;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace wmgf
