#ifndef ROTOMETRY_PARALLEL_HPP
#define ROTOMETRY_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace rotometry {

// Worker count for parallel sweeps. ROTOMETRY_THREADS overrides the hardware
// count; results never depend on it because every loop index owns its slot.
inline int max_worker_threads() {
  if (const char* env = std::getenv("ROTOMETRY_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
      // fall through to the hardware count
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(i) for i in [0, n). Indices are claimed from a shared counter, so
// the schedule is dynamic; fn must only write state owned by index i. The
// first exception thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn, int num_threads = 0) {
  if (n <= 0) return;
  if (num_threads <= 0) num_threads = max_worker_threads();
  if (num_threads > n) num_threads = static_cast<int>(n);
  if (num_threads == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);  // stop handing out work
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(num_threads - 1));
  for (int t = 1; t < num_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rotometry

#endif  // ROTOMETRY_PARALLEL_HPP
