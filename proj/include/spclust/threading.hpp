#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace spclust {

// Global cap on worker threads. 0 means "not set": fall back to the
// SPACING_CLUST_THREADS environment variable, then hardware concurrency.
inline int& thread_cap_slot() {
    static int cap = 0;
    return cap;
}

inline void set_max_threads(int n) { thread_cap_slot() = n; }

inline int max_threads() {
    int cap = thread_cap_slot();
    if (cap <= 0) {
        if (const char* env = std::getenv("SPACING_CLUST_THREADS")) {
            cap = std::atoi(env);
        }
    }
    if (cap <= 0) {
        cap = static_cast<int>(std::thread::hardware_concurrency());
    }
    return std::clamp(cap, 1, 64);
}

// Runs fn(block, lo, hi) over [0, n) split into contiguous blocks, one per
// worker. Callers own determinism: per-block results must be merged in
// block order (or with an order-independent reduction such as min).
inline void parallel_blocks(std::size_t n,
                            const std::function<void(int, std::size_t, std::size_t)>& fn) {
    const int workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n ? n : 1));
    if (workers <= 1 || n < 2048) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, w, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace spclust
