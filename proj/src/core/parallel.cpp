// SPDX-License-Identifier: Apache-2.0

#include "ghostsim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ghostsim {

int worker_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("GHOSTSIM_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < n) n = cap;
        } catch (...) {
            // Ignore malformed values; fall back to hardware concurrency.
        }
    }
    return n;
}

void parallel_for(int64_t count, int64_t chunk,
                  const std::function<void(int64_t, int64_t)>& fn) {
    if (count <= 0) return;
    if (chunk < 1) chunk = 1;
    const int64_t n_chunks = (count + chunk - 1) / chunk;
    const int threads = static_cast<int>(
        std::min<int64_t>(worker_threads(), n_chunks));

    if (threads <= 1) {
        for (int64_t c = 0; c < n_chunks; ++c)
            fn(c * chunk, std::min(count, (c + 1) * chunk));
        return;
    }

    // Chunk boundaries are fixed by `chunk`, not by the thread count, so any
    // per-chunk partial results combine identically however work is stolen.
    std::atomic<int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const int64_t c = next.fetch_add(1);
            if (c >= n_chunks) break;
            fn(c * chunk, std::min(count, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace ghostsim
