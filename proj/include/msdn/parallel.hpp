#pragma once

#include <cstddef>
#include <functional>

namespace msdn {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Iterations are split into contiguous chunks; the first
/// exception thrown by any worker is rethrown on the caller's thread.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace msdn
