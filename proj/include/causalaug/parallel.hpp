#pragma once

#include <cstddef>
#include <functional>

namespace causalaug {

/// Runs fn(i) for every i in [0, n) on a bounded pool of `workers` threads
/// (0 = hardware concurrency). Tasks must write only to their own output
/// slots; the first exception thrown by any task is rethrown on the caller.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace causalaug
