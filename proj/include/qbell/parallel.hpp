#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace qbell {

// Worker count: explicit argument > QBELL_WORKERS env var > hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("QBELL_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(worker, begin, end) over a contiguous partition of [0, n).
// Each worker owns its range; callers gather per-worker results in worker order,
// which makes the assembled output independent of the worker count.
inline void parallel_ranges(long long n, int workers,
                            const std::function<void(int, long long, long long)>& fn) {
    if (workers < 1) workers = 1;
    if (n <= 0) return;
    if (workers == 1 || n < 2 * workers) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const long long base = n / workers, rem = n % workers;
    long long begin = 0;
    for (int w = 0; w < workers; ++w) {
        const long long len = base + (w < rem ? 1 : 0);
        pool.emplace_back(fn, w, begin, begin + len);
        begin += len;
    }
    for (auto& t : pool) t.join();
}

}  // namespace qbell
