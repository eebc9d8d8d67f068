#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ahls {

/// Index-parallel loop with deterministic output: each index writes its own
/// slot, so results do not depend on scheduling.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::min<std::size_t>(count, hw == 0 ? 4 : hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace ahls
