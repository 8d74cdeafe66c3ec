#pragma once

#include <functional>

namespace medlda::detail {

// Runs fn(i) for i in [0, n) on up to `threads` threads. Each index is
// visited exactly once; the first exception thrown is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace medlda::detail
