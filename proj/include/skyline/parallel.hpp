#ifndef SKYLINE_PARALLEL_HPP
#define SKYLINE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace skyline {

inline unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

// Evaluates fn(i) for i in [0, n) on up to `workers` threads and returns the
// results in index order. Output is independent of the worker count as long
// as fn(i) depends only on i.
template <typename T, typename Fn>
std::vector<T> map_replications(std::size_t n, Fn &&fn, unsigned workers = 0) {
  std::vector<T> out(n);
  if (workers == 0) {
    workers = default_workers();
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = fn(i);
    }
    return out;
  }
  constexpr std::size_t chunk = 256;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) {
              return;
            }
            const std::size_t end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
              out[i] = fn(i);
            }
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
          next.store(n);
        }
      });
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return out;
}

} // namespace skyline

#endif // SKYLINE_PARALLEL_HPP
