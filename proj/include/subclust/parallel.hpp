#pragma once

#include <cstddef>
#include <functional>

namespace subclust {

// Caps the number of worker threads used by parallel_for. 0 restores the
// default (logical core count). Results never depend on this value.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for every i in [begin, end), split into contiguous blocks over
// up to max_threads() workers. fn must only touch state owned by its own
// index; the first exception thrown by any worker is rethrown to the caller.
// Small ranges run inline.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace subclust
