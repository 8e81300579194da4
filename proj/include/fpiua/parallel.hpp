#pragma once

#include <cstddef>
#include <functional>

namespace fpiua {

// worker count: FPIUA_THREADS when set and positive, else the hardware concurrency
size_t thread_count();

// fn(i) for i in [0, n), split into contiguous chunks across workers;
// the first exception thrown by any worker is rethrown
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace fpiua
