#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spmm {

/// 0 means one worker per hardware thread.
inline std::size_t resolve_workers(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(worker, begin, end) over disjoint chunks covering [0, count).
/// Chunks are handed out dynamically, so which worker sees which chunk is
/// unspecified; callers must not let results depend on it. The first
/// exception thrown by any chunk is rethrown after all workers join.
template <typename Fn>
void parallel_for_workers(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    if (count > 0) fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = std::max<std::size_t>(1, count / (workers * 16));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= count) break;
            fn(w, begin, std::min(count, begin + chunk));
          }
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  parallel_for_workers(count, workers,
                       [&](std::size_t, std::size_t begin, std::size_t end) { fn(begin, end); });
}

}  // namespace spmm
