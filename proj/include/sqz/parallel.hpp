#pragma once

#include <cstddef>
#include <functional>

namespace sqz {

/// Worker count for internal sweeps: SQZ_CAVITY_THREADS if set to a positive
/// integer, otherwise std::thread::hardware_concurrency().
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sqz
