#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dchain {

// Static block partition of [0, n) over hardware threads. fn(i) must only
// write to slot i of its outputs, so results do not depend on thread count.
// grain is the smallest number of items worth a thread.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t grain = 256) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n / std::max<std::size_t>(grain, 1) + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block, hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dchain
