#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rs::mc {

// Order-stable tree reduction: the summation tree depends only on n, never on
// how work was scheduled, so ensemble statistics are bit-identical for any
// worker count.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs job(path, worker) for path = 0..n_paths-1 on `workers` threads with
// atomic work stealing. Jobs must write only to per-path slots; determinism
// then follows from reducing the slots in path order afterwards. The first
// exception (by path index) is rethrown after all threads join.
inline void run_paths(std::size_t n_paths, unsigned workers,
                      const std::function<void(std::size_t, unsigned)>& job) {
  workers = resolve_workers(workers);
  if (workers == 1 || n_paths <= 1) {
    for (std::size_t p = 0; p < n_paths; ++p) job(p, 0);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_path = n_paths;

  auto worker_loop = [&](unsigned worker) {
    for (;;) {
      std::size_t p = next.fetch_add(1);
      if (p >= n_paths) return;
      try {
        job(p, worker);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (p < first_error_path) {
          first_error_path = p;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned wkr = 0; wkr < workers; ++wkr)
    threads.emplace_back(worker_loop, wkr);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rs::mc
