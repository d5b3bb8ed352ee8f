#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace pdc {

/// Run fn(begin, end) over [0, n) split into contiguous chunks. Each index is
/// visited exactly once, so results are identical for any thread count as long
/// as fn writes only to per-index slots.
template <typename Fn>
void parallel_for(Eigen::Index n, int threads, Fn&& fn) {
  const Eigen::Index workers = std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(n, 1));
  if (workers == 1) {
    fn(Eigen::Index{0}, n);
    return;
  }
  const Eigen::Index chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace pdc
