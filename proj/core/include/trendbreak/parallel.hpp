#pragma once

#include <functional>

namespace trendbreak {

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency). Contiguous chunk assignment; callers write results into
// index-addressed storage, so output is identical for any thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace trendbreak
