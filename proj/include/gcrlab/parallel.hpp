#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gcr {

/// Number of worker threads used by node loops (1 = serial).
void set_thread_count(int count);
int thread_count();

/// Runs body(i) for i in [0, n). Iterations must write disjoint memory.
/// Small loops and single-thread mode run serially.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const auto workers = static_cast<std::size_t>(thread_count());
  constexpr std::size_t kMinPerWorker = 4096;
  if (workers <= 1 || n < 2 * kMinPerWorker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunks = std::min(workers, n / kMinPerWorker);
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<std::jthread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * per;
    const std::size_t hi = std::min(n, lo + per);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace gcr
