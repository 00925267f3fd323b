#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rlmc {

// Splits [0, count) into contiguous chunks, one worker thread per chunk.
// Each item writes to its own output slot, so results are bitwise identical
// for every thread count; reductions happen afterwards in index order.
inline void parallel_for(long count, int threads,
                         const std::function<void(long begin, long end)>& body) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  if (threads == 1 || count <= 1) {
    body(0, count);
    return;
  }
  const long workers = std::min<long>(threads, count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const long chunk = (count + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    const long begin = w * chunk;
    const long end = std::min(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace rlmc
