#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rfq/distributions.hpp"

namespace test_support {

// Parameter ranges follow the fitted ranges reported for this market, with
// some slack so the property tests sweep a wider region.
inline rfq::SepParams random_sep(std::mt19937_64& rng, double alpha_lo = 0.3,
                                 double alpha_hi = 2.0) {
  std::uniform_real_distribution<double> ua(alpha_lo, alpha_hi);
  std::uniform_real_distribution<double> ul(-1.2, 1.2);
  std::uniform_real_distribution<double> um(-1.0, 1.0);
  std::uniform_real_distribution<double> us(0.3, 3.0);
  return {ua(rng), ul(rng), um(rng), us(rng)};
}

inline rfq::ClientParams random_client(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> un(-2.5, 2.5);
  std::uniform_real_distribution<double> ut(0.4, 3.0);
  return {un(rng), ut(rng)};
}

struct SampleStats {
  double mean = 0.0;
  double var = 0.0;
  double skew = 0.0;
  std::size_t n = 0;
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(s.n);
  double v = 0.0, sk = 0.0;
  for (double x : xs) {
    const double d = x - m;
    v += d * d;
    sk += d * d * d;
  }
  v /= static_cast<double>(s.n);
  s.mean = m;
  s.var = v;
  s.skew = sk / (static_cast<double>(s.n) * std::pow(v, 1.5));
  return s;
}

// One-sample Kolmogorov-Smirnov statistic against a cdf.
template <class Cdf>
double ks_statistic(std::vector<double> xs, const Cdf& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Critical value of sqrt(n) * D_n at the 1% level (asymptotic).
inline constexpr double ks_crit_1pct = 1.6276;

}  // namespace test_support
