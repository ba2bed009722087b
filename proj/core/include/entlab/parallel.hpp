#pragma once

#include <cstddef>
#include <functional>

namespace entlab {

// Worker count: ENTLAB_WORKERS when set, hardware concurrency otherwise.
std::size_t worker_count();

// Runs fn(0..count-1) on a worker pool. Jobs must write to disjoint slots;
// the first exception is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  bool enable = true);

}  // namespace entlab
