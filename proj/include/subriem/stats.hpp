#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace subriem {

// Pairwise (cascade) summation over a fixed index order.  Both the rounding
// pattern and the result are functions of the array contents alone, so
// reductions computed this way are bit-identical for any worker count.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 64) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n = 0;
};

// Sample mean with its standard error, both from pairwise sums.
inline MeanStderr mean_stderr(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("mean_stderr: need n >= 2");
  const long n = static_cast<long>(x.size());
  const double mean = pairwise_sum(x) / static_cast<double>(n);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

// Runs fn(begin, end) over a partition of [0, n) on `workers` threads.  Each
// index is handled exactly once, so together with per-index RNG substreams
// and pairwise reduction the caller's output is worker-count independent.
template <class Fn>
void parallel_chunks(long n, int workers, Fn&& fn) {
  if (workers < 1) workers = 1;
  if (n <= 0) return;
  if (workers == 1 || n < 2 * workers) {
    fn(0L, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long begin = static_cast<long>(w) * chunk;
    const long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace subriem
