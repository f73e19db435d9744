#pragma once

#include <cstdint>
#include <functional>

namespace beepsim {

// 0 -> hardware concurrency (at least 1).
int resolve_threads(int requested);

// Runs fn(0..count-1) across up to `threads` workers. Work items are
// claimed from an atomic counter; callers must make results deterministic
// by writing to per-index slots. The first exception thrown by a worker is
// rethrown on the calling thread after all workers join.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace beepsim
