#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace prodsurf {

/// Worker count used by node-local loops. 1 keeps everything on the caller.
int thread_count();
void set_thread_count(int n);

/// Runs fn(k) for k in [0, n). Each index is visited exactly once; callers
/// write only to slot k so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, thread_count())), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t k = lo; k < hi; ++k) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace prodsurf
