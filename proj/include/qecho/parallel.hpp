#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace qecho {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(block_index, begin, end) over fixed-size blocks of [0, n_items).
// Block boundaries depend only on n_items and block_size, never on the thread
// count, so reductions keyed by block index are bit-reproducible for any
// parallelism degree. If several blocks fail, the lowest block index wins.
template <class Fn>
void for_each_block(std::size_t n_items, std::size_t block_size, int threads,
                    Fn&& fn) {
  if (n_items == 0) return;
  const std::size_t n_blocks = (n_items + block_size - 1) / block_size;
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(n_items, lo + block_size);
    fn(b, lo, hi);
  };

  const int n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), n_blocks);
  if (n_threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    return;
  }

  std::atomic<std::size_t> cursor{0};
  std::vector<std::exception_ptr> failures(n_blocks);
  auto worker = [&]() {
    for (;;) {
      const std::size_t b = cursor.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      try {
        run_block(b);
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  for (std::size_t b = 0; b < n_blocks; ++b) {
    if (failures[b]) std::rethrow_exception(failures[b]);
  }
}

}  // namespace qecho
