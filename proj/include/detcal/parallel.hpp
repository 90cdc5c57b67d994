#pragma once

#include <cstddef>
#include <functional>

namespace detcal {

/// Worker count: DETCAL_THREADS when set, otherwise hardware concurrency.
unsigned worker_threads();

/// Runs fn(0..count-1) across `threads` workers (0 = worker_threads()) with
/// a static index stride, so every index is processed exactly once and
/// writes to per-index slots are race-free. The first exception thrown by
/// any worker (lowest worker id) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace detcal
