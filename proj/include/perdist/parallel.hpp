#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace perdist {

/// Upper bound on worker threads. Defaults to PERDIST_THREADS when set,
/// otherwise std::thread::hardware_concurrency().
unsigned max_threads();
void set_max_threads(unsigned n);

/// Runs body(i) for i in [0, count). Each index is visited exactly once;
/// callers write results into per-index slots, so the outcome does not
/// depend on the thread count. The first exception thrown is rethrown.
template <typename Body>
void parallel_for(Eigen::Index count, Body&& body) {
  const auto workers = static_cast<Eigen::Index>(
      std::min<Eigen::Index>(max_threads(), std::max<Eigen::Index>(count / 256, 1)));
  if (workers <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Eigen::Index chunk = (count + workers - 1) / workers;
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (Eigen::Index i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace perdist
