#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mts {

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Index-parallel loop with deterministic work assignment; results must be
// written to disjoint preallocated slots so thread count never changes output.
template <class Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t nthreads = std::min<size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (size_t i = t; i < n; i += nthreads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mts
