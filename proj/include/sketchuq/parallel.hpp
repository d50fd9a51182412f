#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "sketchuq/types.hpp"

namespace sketchuq {

// Resolves the worker count: explicit request > SKETCHUQ_THREADS > hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SKETCHUQ_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block partition of [0, count) over the given number of workers.
// Results must be written to per-index slots by fn; the caller reduces
// sequentially, so output is independent of the thread count.
inline void parallel_for(Index count, int threads, const std::function<void(Index)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<Index>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    const Index lo = count * w / workers;
    const Index hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sketchuq
