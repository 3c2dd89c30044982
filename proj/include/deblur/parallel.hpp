#pragma once

#include <cstddef>
#include <functional>

namespace deblur {

// Worker count used by parallel_for. 0 restores the default (hardware
// concurrency, or DEBLUR_THREADS when set).
void set_thread_count(int threads);
int thread_count();

// Calls body(i) for every i in [0, n). Work is split into fixed contiguous
// chunks, so each index is processed exactly once regardless of the thread
// count; bodies must only write to index-owned state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace deblur
