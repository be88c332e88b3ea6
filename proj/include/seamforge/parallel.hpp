#pragma once

#include <cstddef>
#include <functional>

namespace seamforge {

/// Worker count: SEAMFORGE_THREADS env var when set (>=1), otherwise the
/// hardware concurrency. Overridable for tests.
int thread_count();
void set_thread_count(int n);  // n <= 0 restores the default

/// Runs fn(i) for i in [0, n). Each index is processed exactly once and must
/// write only its own output slots; under that contract the result is
/// identical for every worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Block variant: fn(begin, end) over a partition of [0, n).
void parallel_for_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace seamforge
