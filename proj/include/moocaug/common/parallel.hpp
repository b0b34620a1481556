#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace moocaug {

// Applies `fn` to every item with at most `max_concurrency` worker threads.
// Results keep input order regardless of completion order. The first
// exception thrown by `fn` is rethrown after all workers stop.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, std::size_t max_concurrency, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> results(items.size());
  const std::size_t workers = std::clamp<std::size_t>(max_concurrency, 1, std::max<std::size_t>(items.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= items.size()) return;
        try {
          results[i] = fn(items[i]);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace moocaug
