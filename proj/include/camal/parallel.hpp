#pragma once

#include <thread>
#include <vector>

namespace camal {

// Applies f to indices 0..n-1 on a small thread pool; results come back in
// index order regardless of completion order.  f must not throw; expected
// per-item failures belong in the result type.
template <class F>
auto indexed_parallel_map(size_t n, F f) -> std::vector<decltype(f(size_t{0}))> {
  using R = decltype(f(size_t{0}));
  std::vector<R> out(n);
  unsigned workers = std::min<size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += workers) out[i] = f(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace camal
