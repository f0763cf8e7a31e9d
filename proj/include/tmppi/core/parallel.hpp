#pragma once

#include <cstddef>
#include <functional>

namespace tmppi {

/// Runs fn(i) for i in [0, n) on up to `workers` threads using contiguous
/// static chunks. Callers must make fn(i) depend only on i; results are then
/// independent of the worker count. workers <= 1 runs inline.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace tmppi
