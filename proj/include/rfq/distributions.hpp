#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfq {

inline constexpr double pi = 3.14159265358979323846;

// Dealer-quote distribution on the reduced-quote scale: skew exponential
// power with shape alpha in (0, 2], asymmetry lambda, location mu, scale
// sigma. alpha below alpha_floor is rejected; the density degenerates to a
// spike as alpha -> 0 and fits are clamped away from it.
struct SepParams {
  double alpha = 2.0;
  double lambda = 0.0;
  double mu = 0.0;
  double sigma = 1.0;

  static constexpr double alpha_floor = 1e-3;
  static constexpr double alpha_ceiling = 2.0;

  void validate() const {
    if (!(alpha >= alpha_floor) || !(alpha <= alpha_ceiling))
      throw std::domain_error("SepParams: alpha must lie in [" +
                              std::to_string(alpha_floor) + ", 2], got " +
                              std::to_string(alpha));
    if (!(sigma > 0.0))
      throw std::domain_error("SepParams: sigma must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(mu))
      throw std::domain_error("SepParams: non-finite parameter");
  }

  // Mirror image: if X has these parameters then -X has the reflected ones.
  SepParams reflected() const { return {alpha, -lambda, -mu, sigma}; }
};

// Client reservation-value distribution: Gaussian with mean nu and standard
// deviation tau on the reduced-quote scale.
struct ClientParams {
  double nu = 0.0;
  double tau = 1.0;

  void validate() const {
    if (!(tau > 0.0)) throw std::domain_error("ClientParams: tau must be positive");
    if (!std::isfinite(nu)) throw std::domain_error("ClientParams: non-finite nu");
  }

  ClientParams reflected() const { return {-nu, tau}; }
};

inline double gaussian_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * pi));
}

inline double gaussian_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

inline double gaussian_pdf(double x, const ClientParams& c) {
  c.validate();
  return gaussian_pdf(x, c.nu, c.tau);
}

inline double gaussian_cdf(double x, const ClientParams& c) {
  c.validate();
  return gaussian_cdf(x, c.nu, c.tau);
}

// Standard normal cdf.
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

// log of the exponential-power normalizer c*sigma, c = 2 alpha^(1/alpha - 1) Gamma(1/alpha).
// Kept in log space: Gamma(1/alpha) overflows well before alpha reaches its floor.
inline double ep_log_norm(double sigma, double alpha) {
  return std::log(2.0) + (1.0 / alpha - 1.0) * std::log(alpha) +
         std::lgamma(1.0 / alpha) + std::log(sigma);
}

inline void check_ep_args(double sigma, double alpha) {
  if (!(sigma > 0.0)) throw std::domain_error("ep_pdf: sigma must be positive");
  if (!(alpha >= SepParams::alpha_floor) || !(alpha <= SepParams::alpha_ceiling))
    throw std::domain_error("ep_pdf: alpha out of range");
}

}  // namespace detail

inline double ep_log_pdf(double x, double mu, double sigma, double alpha) {
  detail::check_ep_args(sigma, alpha);
  const double z = std::abs((x - mu) / sigma);
  return -std::pow(z, alpha) / alpha - detail::ep_log_norm(sigma, alpha);
}

inline double ep_pdf(double x, double mu, double sigma, double alpha) {
  return std::exp(ep_log_pdf(x, mu, sigma, alpha));
}

// Azzalini skewing argument: w = sign(z) |z|^(alpha/2) lambda sqrt(2/alpha).
inline double sep_skew_argument(double z, double alpha, double lambda) {
  const double s = z < 0.0 ? -1.0 : (z > 0.0 ? 1.0 : 0.0);
  return s * std::pow(std::abs(z), 0.5 * alpha) * lambda * std::sqrt(2.0 / alpha);
}

inline double sep_log_pdf(double x, const SepParams& p) {
  p.validate();
  const double z = (x - p.mu) / p.sigma;
  const double w = sep_skew_argument(z, p.alpha, p.lambda);
  // 2 Phi(w) f_EP; log(2 Phi(w)) = log(erfc(-w/sqrt 2)).
  return std::log(std::erfc(-w / std::sqrt(2.0))) + ep_log_pdf(x, p.mu, p.sigma, p.alpha);
}

inline double sep_pdf(double x, const SepParams& p) { return std::exp(sep_log_pdf(x, p)); }

// Raw moment E[Z^m] of Z ~ SEP(0,1,alpha,lambda), m in 1..4. For a general
// SEP(mu,sigma,alpha,lambda) variable X this is E[((X-mu)/sigma)^m].
inline double sep_moment(int m, const SepParams& p) {
  p.validate();
  if (m < 1 || m > 4) throw std::domain_error("sep_moment: order must be in 1..4");
  const double a = p.alpha;
  if (m % 2 == 0) {
    // E[Z^(2k)] = alpha^(2k/alpha) Gamma((2k+1)/alpha) / Gamma(1/alpha)
    return std::exp((m / a) * std::log(a) + std::lgamma((m + 1.0) / a) -
                    std::lgamma(1.0 / a));
  }
  const double lam = p.lambda;
  if (lam == 0.0) return 0.0;
  if (std::abs(lam) > 50.0)
    throw std::domain_error("sep_moment: |lambda| > 50 unsupported (series truncation bound)");

  // E[Z^(2k+1)] = 2 alpha^((2k+1)/alpha) lambda / (sqrt(pi) Gamma(1/alpha) (1+lambda^2)^(s+1/2))
  //               * sum_n Gamma(s+n+1/2) / (2n+1)!! * q^n,  s = (m+1)/alpha,
  // q = 2 lambda^2/(1+lambda^2). Terms decay with ratio -> q/2 < 1; the sum is
  // truncated once a term drops below 1e-12 of the running total.
  const double s = (m + 1.0) / a;
  const double lam2 = lam * lam;
  const double q = 2.0 * lam2 / (1.0 + lam2);
  const double log_q = std::log(q);

  double log_term = std::lgamma(s + 0.5);  // n = 0 term, (2*0+1)!! = 1
  const double scale = log_term;  // rescale to avoid overflow of Gamma(s+n+1/2)
  double sum = 1.0;
  constexpr std::size_t max_terms = 2'000'000;
  for (std::size_t n = 0; n + 1 < max_terms; ++n) {
    log_term += std::log(s + n + 0.5) - std::log(2.0 * n + 3.0) + log_q;
    const double term = std::exp(log_term - scale);
    sum += term;
    if (term < 1e-12 * sum && n > 4) break;
  }
  const double log_pref = std::log(2.0) + (m / a) * std::log(a) -
                          0.5 * std::log(pi) - std::lgamma(1.0 / a) -
                          (s + 0.5) * std::log1p(lam2);
  return (lam < 0.0 ? -1.0 : 1.0) * std::abs(lam) * std::exp(log_pref + scale) * sum;
}

// Draws from SEP(mu,sigma,alpha,lambda). The symmetric exponential-power
// part uses the gamma transform |Z|^alpha/alpha ~ Gamma(1/alpha, 1); skew is
// produced by Azzalini selection (accept with probability Phi(w), rate 1/2).
class SepSampler {
 public:
  SepSampler(const SepParams& p, std::uint64_t seed) : p_(p), rng_(seed), gamma_(1.0 / p.alpha) {
    p.validate();
  }

  double operator()() {
    for (;;) {
      const double r = gamma_(rng_);
      double z = std::pow(p_.alpha * r, 1.0 / p_.alpha);
      if (unit_(rng_) < 0.5) z = -z;
      if (p_.lambda == 0.0) return p_.mu + p_.sigma * z;
      const double w = sep_skew_argument(z, p_.alpha, p_.lambda);
      if (unit_(rng_) < std_normal_cdf(w)) return p_.mu + p_.sigma * z;
    }
  }

 private:
  SepParams p_;
  std::mt19937_64 rng_;
  std::gamma_distribution<double> gamma_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline std::vector<double> sep_sample(const SepParams& p, std::size_t count, std::uint64_t seed) {
  SepSampler draw(p, seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw());
  return out;
}

}  // namespace rfq
