#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "darkbright/common.hpp"

namespace darkbright {

/// Worker cap: DARKBRIGHT_THREADS if set, else hardware concurrency, never 0.
inline int max_threads() {
  if (const char* env = std::getenv("DARKBRIGHT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

/// Run fn(i) for i in [0, count) on up to max_threads() workers.  Indices are
/// handed out atomically but results are whatever fn writes at slot i, so
/// output ordering never depends on the thread count.  The first exception
/// wins and is rethrown on the caller thread.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!failed.exchange(true)) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failed.load() && err) std::rethrow_exception(err);
}

inline std::vector<double> linspace(double start, double stop, int points) {
  if (points < 1) throw validation_error("linspace: need at least one point");
  if (points == 1) return {start};
  if (!(stop > start))
    throw validation_error("linspace: grid must be strictly increasing");
  std::vector<double> g(points);
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = start + step * i;
  g.back() = stop;
  return g;
}

inline std::vector<double> logspace(double start, double stop, int points) {
  if (!(start > 0.0) || !(stop > 0.0))
    throw validation_error("logspace: endpoints must be positive");
  auto g = linspace(std::log(start), std::log(stop), points);
  for (auto& v : g) v = std::exp(v);
  if (points >= 1) {
    g.front() = start;
    g.back() = stop;
  }
  return g;
}

}  // namespace darkbright
