#pragma once

#include <thread>
#include <vector>

namespace jacobirl {

// Strided static scheduling; fn(i) must only touch index-i state. Results
// are deterministic whenever fn(i) depends on i alone (per-index rng seeds).
template <class F>
void parallel_for(int begin, int end, int jobs, F fn) {
  const int count = end - begin;
  if (count <= 0) return;
  if (jobs <= 1 || count == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  const int workers = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([=]() {
      for (int i = begin + w; i < end; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

inline int default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace jacobirl
