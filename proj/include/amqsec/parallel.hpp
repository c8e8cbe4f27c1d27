#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace amqsec {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency workers.
/// Each index runs exactly once; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_workers = 0) {
  unsigned workers = max_workers ? max_workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Ordered results of fn(i) for i in [0, n).
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, unsigned max_workers = 0) {
  static_assert(!std::is_same_v<T, bool>, "vector<bool> elements are not independently writable");
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, max_workers);
  return out;
}

}  // namespace amqsec
