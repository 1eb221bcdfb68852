#pragma once

#include <cstddef>
#include <functional>

namespace quddpm {

/// Worker count used by parallel_for; 0 selects the hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Bodies must write only
/// to per-index slots; any reduction happens afterwards in index order, so the
/// result does not depend on the worker count. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace quddpm
