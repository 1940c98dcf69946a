#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace toric {

template <typename T, typename Fn>
std::vector<T> run_trials(long trials, std::uint64_t seed, int threads,
                          const Fn& per_trial) {
  std::vector<T> out(trials);
  threads = std::max(1, threads);
  if (threads == 1) {
    for (long t = 0; t < trials; ++t) out[t] = per_trial(t, derive_seed(seed, t));
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  const long chunk = std::max<long>(1, trials / (threads * 8));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        long start = next.fetch_add(chunk);
        if (start >= trials) break;
        long end = std::min(trials, start + chunk);
        for (long t = start; t < end; ++t) out[t] = per_trial(t, derive_seed(seed, t));
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace toric
