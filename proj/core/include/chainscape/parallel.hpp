#pragma once

#include <cstddef>
#include <functional>

namespace chainscape {

// Worker cap for every parallel loop in the library (default 1).
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() workers, in
// contiguous blocks. Results must be written to per-index slots; the first
// exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace chainscape
