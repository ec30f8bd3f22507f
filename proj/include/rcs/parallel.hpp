#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rcs {

// Worker count from an explicit request, falling back to the RCS_THREADS
// environment variable and then to 1.
unsigned resolve_threads(unsigned requested);

// Evaluates fn(i) for i in [0, n) on `threads` workers and returns the results
// in index order. The output does not depend on the worker count. If any call
// throws, the exception from the lowest failing index is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = threads == 0 ? 1 : threads;
  if (k == 1 || n < 2) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < k; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace rcs
