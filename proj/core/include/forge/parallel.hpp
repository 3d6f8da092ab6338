#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

namespace forge {

struct ExecutionOptions {
  // Number of worker threads for per-document work. Results never depend on it.
  unsigned workers = 1;
};

unsigned default_workers();

// Applies fn to every item and returns the results in input order. Items are
// split into contiguous blocks, one per worker. If any call throws, the
// exception from the lowest-indexed failing block is rethrown.
template <class T, class Fn>
auto parallel_map(std::span<const T> items, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using Result = std::invoke_result_t<Fn&, const T&>;
  std::vector<Result> out(items.size());
  const std::size_t n = items.size();
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(items[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t block = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t lo = t * block;
      const std::size_t hi = std::min(n, lo + block);
      if (lo >= hi) break;
      pool.emplace_back([&, t, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) out[i] = fn(items[i]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace forge
