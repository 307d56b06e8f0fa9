#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace nsplab {

// Indexed parallel map with deterministic result placement: job i writes
// slot i, so the aggregate is independent of scheduling.
template <typename Result>
std::vector<Result> parallel_map_indexed(int n, int workers,
                                         const std::function<Result(int)>& job) {
  std::vector<Result> results(n);
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) results[i] = job(i);
    return results;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int nw = std::min(workers, n);
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          results[i] = job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace nsplab
