#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace riplab {

/// Worker count: explicit request, else RIP_LAB_THREADS, else 1.
inline int resolveThreads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RIP_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

/// Runs fn(0..count-1) over `threads` workers pulling from a shared counter.
/// Results must be written to per-index slots so the outcome does not depend
/// on scheduling.
inline void parallelForItems(std::size_t count, int threads,
                             const std::function<void(std::size_t)>& fn) {
  threads = resolveThreads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex errorMu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int n = std::min<std::size_t>(threads, count);
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace riplab
