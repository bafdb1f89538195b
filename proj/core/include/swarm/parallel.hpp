#pragma once

#include <cstddef>
#include <functional>

namespace swarm {

/// Number of workers to use when the caller passes 0.
unsigned default_thread_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Indices are handed out in increasing order; results must be
/// written to per-index slots for output to be independent of thread count.
/// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace swarm
