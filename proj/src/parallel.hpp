#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sfbow::detail {

inline std::size_t block_count(std::size_t n, std::size_t block) { return (n + block - 1) / block; }

/// Calls fn(block_index, begin, end) for fixed-size blocks of [0, n). Block
/// boundaries never depend on the thread count, so per-block partial results
/// combined in block order are reproducible on any machine.
template <typename Fn>
void for_each_block(std::size_t n, std::size_t block, Fn&& fn) {
  const std::size_t blocks = block_count(n, block);
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, blocks);
  auto run = [&](std::size_t worker) {
    for (std::size_t b = worker; b < blocks; b += workers)
      fn(b, b * block, std::min(n, (b + 1) * block));
  };
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b, b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sfbow::detail
