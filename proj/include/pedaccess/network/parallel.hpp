#ifndef PEDACCESS_NETWORK_PARALLEL_HPP
#define PEDACCESS_NETWORK_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pedaccess {

/// Splits [0, n) into contiguous ranges and runs fn(begin, end, worker) on up to
/// `threads` workers. Callers write into disjoint slices, so results need no locking.
/// The first exception thrown by a worker is rethrown after all workers finish.
template <typename Fn>
void parallel_ranges(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  const std::size_t workers = std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, n);
  if (workers == 1) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, static_cast<unsigned>(w));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pedaccess

#endif  // PEDACCESS_NETWORK_PARALLEL_HPP
