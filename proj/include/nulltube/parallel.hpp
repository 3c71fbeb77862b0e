#pragma once

#include <cstddef>
#include <functional>

namespace nulltube {

/// Worker count: hardware concurrency, capped by NULLTUBE_THREADS when set.
unsigned worker_count();

/// Runs body(k) for k in [0, n) across workers. Each index runs exactly once;
/// callers write results into per-index slots, so reductions stay ordered.
/// If bodies throw, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nulltube
