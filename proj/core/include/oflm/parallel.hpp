#pragma once

#include <cstddef>
#include <functional>

namespace oflm {

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Indices are split into contiguous chunks; the first exception
// thrown by any worker is rethrown after all workers have joined.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned effective_threads(unsigned requested);

}  // namespace oflm
