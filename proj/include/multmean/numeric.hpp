#pragma once

// Small numeric helpers shared across the library: compensated summation
// and a deterministic block-parallel loop.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace multmean {

// Neumaier-compensated accumulator. Cheap insurance when adding ~1e8 doubles;
// keeps the summation error at a few ulps independent of length.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

namespace detail {

// Runs fn(block_index) for block_index in [0, nblocks). Work is pulled off a
// shared counter, so the caller must make per-block results independent and
// merge them in index order afterwards; that keeps output identical for any
// thread count.
template <class Fn>
void parallel_blocks(uint64_t nblocks, int threads, Fn&& fn) {
  if (threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    threads = hc ? static_cast<int>(hc) : 1;
  }
  if (threads == 1 || nblocks <= 1) {
    for (uint64_t b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  if (static_cast<uint64_t>(threads) > nblocks)
    threads = static_cast<int>(nblocks);

  std::atomic<uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int i = 0; i < threads; ++i) {
    pool.emplace_back([&] {
      for (;;) {
        uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= nblocks) return;
        fn(b);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace multmean
