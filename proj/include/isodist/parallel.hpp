#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace isodist {

// Runs fn(begin, end, worker) over `n_tasks` split into at most `n_threads`
// contiguous blocks. The block layout depends only on (n_tasks, n_threads),
// so per-worker results merged in worker order are reproducible. The first
// exception thrown by any worker is rethrown after all workers finish.
template <typename Fn>
void parallel_blocks(std::size_t n_tasks, std::size_t n_threads, Fn&& fn) {
  n_threads = std::clamp<std::size_t>(n_threads, 1, std::max<std::size_t>(n_tasks, 1));
  if (n_threads == 1) {
    fn(std::size_t{0}, n_tasks, std::size_t{0});
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
      const std::size_t begin = n_tasks * w / n_threads;
      const std::size_t end = n_tasks * (w + 1) / n_threads;
      workers.emplace_back([&, begin, end, w] {
        try {
          fn(begin, end, w);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Effective worker count: 0 means "all hardware threads".
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace isodist
