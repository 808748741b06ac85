#pragma once

#include <cstddef>
#include <functional>

namespace bilat {

/// Worker count: hardware concurrency, capped by BILAT_DDE_THREADS when set.
[[nodiscard]] std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Items are
/// independent; the first exception thrown by any item is rethrown after all
/// workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bilat
