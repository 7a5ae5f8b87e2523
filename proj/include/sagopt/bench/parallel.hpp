#pragma once

#include <cstddef>
#include <functional>

namespace sagopt::bench {

// Worker count: SAG_OPTIM_THREADS when set to a positive integer, otherwise
// (unset or 0) the hardware concurrency. Never less than 1.
std::size_t thread_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers. Indices are handed
// out in increasing order; callers that store results by index get output
// independent of the thread count. The first exception is rethrown after all
// workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace sagopt::bench
