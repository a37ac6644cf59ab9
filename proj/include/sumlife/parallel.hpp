#pragma once

#include <cstddef>
#include <functional>

namespace sumlife {

/// Resolves a user thread request: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// workers. Chunk boundaries depend only on (n, threads); callers must write
/// disjoint outputs so results do not depend on the thread count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace sumlife
