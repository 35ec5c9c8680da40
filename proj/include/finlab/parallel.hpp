#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace finlab {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must be
// independent and pure; chunk boundaries are fixed so results are reproducible
// for any thread count.
template <class Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
  if (count <= 0) return;
  unsigned hw = std::max(1u, threads);
  if (hw == 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  hw = std::min<unsigned>(hw, static_cast<unsigned>(count));
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  int chunk = (count + static_cast<int>(hw) - 1) / static_cast<int>(hw);
  for (unsigned t = 0; t < hw; ++t) {
    int lo = static_cast<int>(t) * chunk;
    int hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &err, &err_mu] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace finlab
