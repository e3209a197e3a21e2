#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rfq::detail {

// Neumaier-compensated accumulator. Summation error stays O(eps) regardless
// of the number of terms, so chunked reductions combine reproducibly.
class compensated_sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline unsigned worker_count() {
  static const unsigned n = [] {
    if (const char* env = std::getenv("RFQ_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
  }();
  return n;
}

// Splits [0, count) into fixed-size blocks and sums fn(begin, end) over all
// blocks. Block layout and the combination order depend only on count and
// block_size, never on the number of threads, so results are bit-stable.
inline double parallel_block_sum(std::size_t count, std::size_t block_size,
                                 const std::function<double(std::size_t, std::size_t)>& fn) {
  if (count == 0) return 0.0;
  const std::size_t n_blocks = (count + block_size - 1) / block_size;
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), n_blocks));

  std::vector<double> block_sums(n_blocks, 0.0);
  if (n_workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const std::size_t lo = b * block_size;
      block_sums[b] = fn(lo, std::min(lo + block_size, count));
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto run = [&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= n_blocks) break;
        const std::size_t lo = b * block_size;
        block_sums[b] = fn(lo, std::min(lo + block_size, count));
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
  }

  compensated_sum total;
  for (double s : block_sums) total.add(s);
  return total.value();
}

}  // namespace rfq::detail
