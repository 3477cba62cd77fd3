#pragma once

#include <cstddef>
#include <functional>

namespace monolab {

/// Runs body(i) for i in [0, count) on up to `jobs` threads (0 means one per
/// hardware thread). The first exception thrown by any call is rethrown after
/// all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace monolab
