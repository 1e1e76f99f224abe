#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cclt {

// Runs fn(block) for block = 0..nblocks-1 on `workers` threads and returns
// the results indexed by block. Reductions over the returned vector are done
// by the caller in block order, so the outcome never depends on the worker
// count.
template <class T>
std::vector<T> parallel_blocks(std::size_t nblocks, int workers, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(nblocks);
    if (workers <= 1 || nblocks <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) out[b] = fn(b);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            out[b] = fn(b);
        }
    };
    const int nthreads = std::min<int>(workers, static_cast<int>(nblocks));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

inline int default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace cclt
