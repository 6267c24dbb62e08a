#pragma once

#include <cstddef>
#include <functional>

namespace cchain {

// Worker count: CCHAIN_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, count) on up to worker_count() threads. Each
// index is visited exactly once; results must be written to per-index slots
// so output does not depend on scheduling. The first exception thrown by a
// body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace cchain
