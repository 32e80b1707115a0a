#pragma once

#include <cstddef>
#include <functional>

namespace bloch {

/// Number of worker threads, read from BLOCH_WORKERS (default: hardware
/// concurrency, at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. If any call
/// throws, the exception from the lowest index is rethrown after all workers
/// finish, so error reporting does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bloch
