#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace dstori {

/// Runs f(0..n-1) on up to `workers` threads; results keep input order. The
/// exception of the lowest failing index is rethrown after all threads join.
template <class T, class F>
std::vector<T> parallel_map(size_t n, int workers, F f) {
  std::vector<std::optional<T>> slot(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<size_t> next{0};
  auto run = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slot[i].emplace(f(i));
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  size_t k = std::min<size_t>(n, static_cast<size_t>(std::max(1, workers)));
  std::vector<std::thread> pool;
  for (size_t t = 1; t < k; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& v : slot) out.push_back(std::move(*v));
  return out;
}

}  // namespace dstori
