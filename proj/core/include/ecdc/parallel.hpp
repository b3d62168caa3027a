#pragma once

#include <cstddef>
#include <functional>

namespace ecdc {

/// Worker count: hardware concurrency, capped by the ECDC_THREADS variable.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Callers write
/// results into per-index slots, so reductions stay deterministic. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace ecdc
