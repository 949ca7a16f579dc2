#pragma once

#include <functional>

namespace singmap {

// Worker count from SINGMAP_THREADS (default 1).
int thread_count();

// Runs body(k) for k in [0, n); blocks are contiguous per worker so results
// written to disjoint slots are independent of the thread count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace singmap
