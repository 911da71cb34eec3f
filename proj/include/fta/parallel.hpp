#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fta {

/// Number of workers actually used for `requested` (0 = hardware default,
/// floor 1).
std::size_t resolve_threads(std::size_t requested);

/// Runs fn(i) for i in [0, count) across at most `threads` workers, each
/// taking a contiguous block. Results must be written to pre-sized storage
/// indexed by i, which keeps output independent of scheduling. The first
/// exception thrown by any worker is rethrown on the calling thread after
/// all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace fta
