#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dfrcsg {

// Worker count: DFRC_SG_THREADS caps it, otherwise hardware concurrency.
inline int thread_budget() {
    if (const char* env = std::getenv("DFRC_SG_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, n). Work items must write only to their own
// output slot; the partition of indices does not depend on the worker
// count, so results are identical for any thread budget.
inline void parallel_for(long n, const std::function<void(long)>& body) {
    const int workers = std::min<long>(thread_budget(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dfrcsg
