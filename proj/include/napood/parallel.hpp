#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace napood {

/// Worker count: NAP_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = default).
///
/// Indices are handed out in contiguous blocks. If any call throws, the
/// exception from the lowest failing index is rethrown after all workers
/// join, so error reporting does not depend on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace napood
