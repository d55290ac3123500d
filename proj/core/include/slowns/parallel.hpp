#pragma once

#include <cstddef>
#include <functional>

namespace slowns {

// SLOWNS_THREADS if set and positive, otherwise the hardware count.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous blocks; each
// index is handled by exactly one thread, so results written per index do not
// depend on the schedule. The first exception thrown (lowest index) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace slowns
