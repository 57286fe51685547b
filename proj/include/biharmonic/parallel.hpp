#pragma once

#include <cstddef>
#include <functional>

namespace biharmonic {

// Worker count used by parallel_for. Defaults to BIHARMONIC_LAB_THREADS when
// set, otherwise std::thread::hardware_concurrency().
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, count). Iterations must be independent; results
// are written by index so the outcome does not depend on scheduling. The
// first exception thrown by any iteration is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace biharmonic
