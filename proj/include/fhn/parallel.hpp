#pragma once

#include <cstddef>
#include <functional>

namespace fhn {

/// Worker count from the FHN_THREADS environment variable; defaults to the
/// hardware concurrency, minimum 1.
int thread_count();

/// Runs body(i) for i in [begin, end) on up to thread_count() threads.
/// Indices are split into contiguous blocks, so results written per index are
/// independent of the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace fhn
