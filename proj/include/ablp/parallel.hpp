#pragma once

#include <cstddef>
#include <functional>

namespace ablp {

/// Worker count from AB_LINKPRED_THREADS, else hardware concurrency (min 1).
std::size_t default_thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, count) on up to
/// `threads` workers. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ablp
