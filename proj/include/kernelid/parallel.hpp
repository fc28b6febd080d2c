#pragma once

#include <cstddef>
#include <functional>

namespace kernelid {

// Worker count: KERNELID_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(begin, end) over a fixed partition of [0, n) into contiguous
// blocks. The partition depends only on n and thread_count(), so callers
// that reduce per-block results in block order get schedule-independent
// output. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace kernelid
