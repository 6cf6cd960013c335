#ifndef GAPMODE_PARALLEL_HPP
#define GAPMODE_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gapmode {

/// Worker cap: GAPMODE_THREADS env var, else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("GAPMODE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, n) on up to worker_count() threads.
/// Results must be written to preallocated per-index slots so collection
/// order is deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace gapmode

#endif
