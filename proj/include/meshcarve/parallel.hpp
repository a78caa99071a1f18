#pragma once

#include <cstddef>
#include <functional>

namespace mc {

// Worker count: hardware concurrency, capped by the SC_THREADS env var.
int worker_count();

// Runs body(begin, end) over contiguous chunks of [0, n), one chunk per
// worker. Chunk boundaries depend only on n and the worker count, so callers
// that write to disjoint slots stay deterministic.
void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mc
