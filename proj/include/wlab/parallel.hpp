#pragma once

#include <cstddef>
#include <functional>

namespace wlab {

// Worker count from WHITNEY_LAB_THREADS (default: hardware concurrency, at least 1).
int thread_count();

// Runs fn(i) for i in [0, n). Each index is handled exactly once; callers write
// results into per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace wlab
