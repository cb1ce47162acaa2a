// SPDX-License-Identifier: Apache-2.0
//
// Minimal deterministic parallel-for.  Work is split into fixed-size chunks
// whose boundaries do not depend on the thread count, and reductions combine
// per-chunk partials in chunk order, so results are bit-identical whether the
// loop runs on 1 thread or many.  The thread count is capped by the
// GHOSTSIM_THREADS environment variable.

#pragma once

#include <cstdint>
#include <functional>

namespace ghostsim {

/// Number of worker threads to use: min(hardware, GHOSTSIM_THREADS).
int worker_threads();

/// Run fn(begin, end) over [0, count) split into chunks of `chunk` items.
/// fn must be safe to call concurrently on disjoint ranges.
void parallel_for(int64_t count, int64_t chunk,
                  const std::function<void(int64_t, int64_t)>& fn);

} // namespace ghostsim
