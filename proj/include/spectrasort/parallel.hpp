#pragma once

#include <cstddef>
#include <functional>

namespace spectrasort {

/// Run fn(0..n-1) on up to `jobs` threads. Each index writes only its own
/// output slot, so results do not depend on `jobs`. The exception of the
/// lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace spectrasort
