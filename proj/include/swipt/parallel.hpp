#pragma once

#include <cstddef>
#include <functional>

namespace swipt {

/// Process-wide cap on worker threads used for block evaluation.
/// Results never depend on this value; only wall-clock time does.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Runs `fn(i)` for every i in [0, count). Jobs are handed out in index
/// order; callers write into per-index slots and merge afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace swipt
