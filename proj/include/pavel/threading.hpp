#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace pavel {

namespace detail {
inline std::atomic<int>& thread_count_storage() {
  static std::atomic<int> n{0};
  return n;
}
}  // namespace detail

// Global worker count; 0 means hardware concurrency.
inline void set_thread_count(int n) { detail::thread_count_storage() = n; }
inline int thread_count() {
  int n = detail::thread_count_storage();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [begin, end) across worker threads. Work is split in
// contiguous chunks so callers can rely on per-index isolation; any reduction
// must be done by the caller in index order afterward.
inline void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t)>& fn) {
  int64_t n = end - begin;
  if (n <= 0) return;
  int workers = thread_count();
  if (workers <= 1 || n < 256) {
    for (int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  workers = static_cast<int>(std::min<int64_t>(workers, n));
  std::atomic<int64_t> next{begin};
  const int64_t chunk = std::max<int64_t>(1, n / (workers * 8));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int64_t lo = next.fetch_add(chunk);
        if (lo >= end) break;
        int64_t hi = std::min(lo + chunk, end);
        for (int64_t i = lo; i < hi; ++i) fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pavel
