#pragma once

#include <cstddef>
#include <functional>

namespace fractint {

// Worker count: the override if set, else FRACTINT_THREADS, else hardware
// concurrency. Always at least 1.
int worker_count();
// 0 clears the override.
void set_worker_override(int n);

// Runs fn(i) for i in [0, n). Each index must write only its own output slot;
// callers reduce afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fractint
