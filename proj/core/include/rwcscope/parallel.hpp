#pragma once

#include <cstddef>
#include <functional>

namespace rwcscope {

/// Worker count for internal parallel loops. Honors RWC_SCOPE_THREADS when set
/// to a positive integer, otherwise the hardware concurrency (at least 1).
std::size_t max_threads();

/// Runs fn(i) for i in [0, n). Iterations must write to disjoint outputs; the
/// first exception thrown by any iteration is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rwcscope
