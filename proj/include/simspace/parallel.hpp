#pragma once

#include <cstddef>
#include <functional>

namespace simspace {

/// Worker cap from SIMSPACE_THREADS (falls back to the hardware count).
unsigned worker_count();

/// Runs body(i) for i in [0, count). Iterations must write to disjoint
/// outputs; results are then independent of scheduling. The first exception
/// thrown by any iteration is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace simspace
