#pragma once

#include <cstddef>
#include <functional>

namespace pnm {

// Number of worker threads to use for a requested count (0 = all cores).
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) over a static block partition. The first
// exception thrown by any worker is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace pnm
