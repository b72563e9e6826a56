#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qjh {

// Run fn(i) for i in [0, n) on a fixed pool of worker threads. Results must
// be written to pre-sized slots indexed by i so that merging stays
// deterministic regardless of scheduling.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qjh
