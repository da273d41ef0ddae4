#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace slgap {

/// Worker count: `requested` if nonzero, else SLGAP_THREADS if set, else the
/// hardware concurrency. Always at least 1.
inline std::size_t worker_count(std::size_t requested = 0) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("SLGAP_THREADS")) {
      try {
        n = static_cast<std::size_t>(std::stoul(env));
      } catch (...) {
        n = 0;
      }
    }
  }
  if (n == 0) n = std::thread::hardware_concurrency();
  return std::max<std::size_t>(n, 1);
}

/// Calls f(i) for i in [0, count) on up to `workers` threads. Results must be
/// written to per-index slots; the first exception by index is rethrown.
template <class F>
void parallel_for(std::size_t count, std::size_t workers, F&& f) {
  workers = std::min(std::max<std::size_t>(workers, 1), count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
          try {
            f(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace slgap
