#pragma once

#include <cstddef>
#include <functional>

namespace radialkit {

/// Worker count from RADIALKIT_JOBS, else the hardware concurrency (>= 1).
int default_jobs();

/// Calls fn(i) for every i in [0, count) using up to `jobs` threads
/// (jobs <= 0 means default_jobs()). Indices are split into contiguous
/// blocks; callers must only write to per-index state. The first exception
/// thrown by fn is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace radialkit
