#pragma once

#include <cstddef>
#include <functional>

namespace rvs {

/// Worker count: RVS_THREADS if set and positive, else hardware concurrency.
unsigned threadCount();

/// Calls fn(i) for i in [0, n) on up to threadCount() threads.
/// Exceptions are rethrown on the calling thread (lowest index wins).
void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rvs
