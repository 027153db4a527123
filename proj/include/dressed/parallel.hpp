#pragma once

#include <cstddef>
#include <functional>

namespace dressed {

/// Worker count: `requested` if positive, else DRESSEDSIM_THREADS, else the
/// hardware concurrency (at least 1).
int resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n) on `threads` workers with static striping. The
/// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace dressed
