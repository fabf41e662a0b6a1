#pragma once

#include <cstddef>
#include <functional>

namespace mmdnav {

/// Thread count from MMDNAV_THREADS, else std::thread::hardware_concurrency() (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers using static contiguous chunks.
/// Each index is visited exactly once; the first exception thrown is rethrown after joining.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace mmdnav
