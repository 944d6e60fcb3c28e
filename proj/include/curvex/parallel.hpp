#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace curvex {

inline unsigned default_thread_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(0..n-1), possibly across worker threads. Each index must write
/// only its own output slot; results are then identical to the serial run.
template <typename F>
void parallel_for(long n, F&& fn, unsigned threads = 0) {
  if (threads == 0) threads = default_thread_count();
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&]() {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(
      std::min<long>(static_cast<long>(threads), n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace curvex
