#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <thread>
#include <vector>

namespace fluxline {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};
  return cap;
}
}  // namespace detail

/// Caps internal parallelism. 0 means "use hardware_concurrency()".
inline void set_thread_count(int n) { detail::thread_cap().store(std::max(0, n)); }

inline int thread_count() {
  const int cap = detail::thread_cap().load();
  if (cap > 0) return cap;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Calls fn(i) for i in [0, n) on up to thread_count() threads. Each index
/// must write only its own output slot.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(
      static_cast<std::size_t>(thread_count()), std::max<std::size_t>(1, n / 64)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

/// Pairwise (tree) summation with a fixed split, so the result depends only
/// on the input order and never on how the values were produced.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Evaluates fn(i) for every i in parallel and reduces with pairwise_sum.
template <typename Fn>
double parallel_sum(std::size_t n, Fn&& fn) {
  std::vector<double> parts(n);
  parallel_for(n, [&](std::size_t i) { parts[i] = fn(i); });
  return pairwise_sum(parts);
}

}  // namespace fluxline
