#ifndef HDSEG_PARALLEL_HPP
#define HDSEG_PARALLEL_HPP

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "hdseg/types.hpp"

namespace hdseg {

/// 0 or negative means "use the hardware's parallelism".
inline int resolveThreads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over a partition of [0, n) on up to `threads` workers.
/// Ranges are contiguous and disjoint; fn must only write state owned by its
/// range. The partition depends on the thread count, so fn's writes must be
/// position-based (results then do not depend on the thread count).
template <class Fn>
void parallelFor(Index n, int threads, Fn&& fn) {
  threads = resolveThreads(threads);
  if (n <= 0) return;
  if (threads <= 1 || n < 2) {
    fn(Index{0}, n);
    return;
  }
  const Index workers = std::min<Index>(threads, n);
  const Index per = (n + workers - 1) / workers;

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * per;
    const Index end = std::min(n, begin + per);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hdseg

#endif  // HDSEG_PARALLEL_HPP
