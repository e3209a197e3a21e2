#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rfq/distributions.hpp"

namespace rfq {

// Change of variables x = center + scale * atanh(u) mapping (-1,1) onto the
// real line. scale is sized so the integrand's mass sits well inside the
// representable u-range (|atanh(u)| <= ~18 in double precision).
struct TanhMap {
  double center = 0.0;
  double scale = 1.0;

  double to_x(double u) const { return center + scale * std::atanh(u); }
  double to_u(double x) const { return std::tanh((x - center) / scale); }
  double dxdu(double u) const { return scale / ((1.0 - u) * (1.0 + u)); }
};

struct ChebBuildOptions {
  int degree = 24;        // per-panel interpolation degree
  double tol = 1e-9;      // absolute error target for the antiderivative
  int max_depth = 48;     // dyadic refinement cap (cusp panels bottom out here)
  int initial_split = 8;  // uniform pre-split of each breakpoint interval
};

// Piecewise Chebyshev series in the tanh-mapped coordinate. Built as the
// antiderivative of an integrand, so values are cumulative integrals from the
// left end of the covered domain; evaluation clamps to the end values outside
// it. Immutable after construction apart from the clamp-magnitude telemetry.
class ChebApprox {
 public:
  struct Panel {
    double lo, hi;              // u-space bounds
    std::vector<double> coef;   // T_k coefficients, Clenshaw-ready
  };

  ChebApprox() = default;
  ChebApprox(TanhMap map, std::vector<Panel> panels, bool clamp01)
      : map_(map), panels_(std::move(panels)), clamp01_(clamp01) {
    knots_.reserve(panels_.size() + 1);
    for (const auto& p : panels_) knots_.push_back(p.lo);
    knots_.push_back(panels_.back().hi);
    left_value_ = eval_panel(panels_.front(), -1.0);
    right_value_ = eval_panel(panels_.back(), 1.0);
  }

  ChebApprox(const ChebApprox& o)
      : map_(o.map_), panels_(o.panels_), knots_(o.knots_),
        left_value_(o.left_value_), right_value_(o.right_value_),
        clamp01_(o.clamp01_), max_clamp_(o.max_clamp_.load()) {}
  ChebApprox& operator=(const ChebApprox& o) {
    map_ = o.map_; panels_ = o.panels_; knots_ = o.knots_;
    left_value_ = o.left_value_; right_value_ = o.right_value_;
    clamp01_ = o.clamp01_; max_clamp_.store(o.max_clamp_.load());
    return *this;
  }

  double operator()(double x) const {
    const double u = map_.to_u(x);
    double v;
    if (u <= knots_.front()) {
      v = left_value_;
    } else if (u >= knots_.back()) {
      v = right_value_;
    } else {
      const auto it = std::upper_bound(knots_.begin() + 1, knots_.end() - 1, u);
      const auto& p = panels_[static_cast<std::size_t>(it - knots_.begin()) - 1];
      v = eval_panel(p, (2.0 * u - p.lo - p.hi) / (p.hi - p.lo));
    }
    if (clamp01_) {
      const double c = std::clamp(v, 0.0, 1.0);
      if (c != v) note_clamp(std::abs(v - c));
      return c;
    }
    return v;
  }

  // Limits of the cumulative integral at the ends of the covered domain.
  double left_value() const { return left_value_; }
  double value_at_plus_infinity() const { return clamp01_ ? std::min(right_value_, 1.0) : right_value_; }
  double unclamped_limit() const { return right_value_; }

  const TanhMap& map() const { return map_; }
  const std::vector<Panel>& panels() const { return panels_; }
  std::size_t panel_count() const { return panels_.size(); }
  int degree() const {
    std::size_t d = 0;
    for (const auto& p : panels_) d = std::max(d, p.coef.size());
    return static_cast<int>(d) - 1;
  }
  double max_clamp() const { return max_clamp_.load(std::memory_order_relaxed); }

 private:
  static double eval_panel(const Panel& p, double t) {
    // Clenshaw recurrence.
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = p.coef.size(); k-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + p.coef[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + p.coef[0];
  }

  void note_clamp(double magnitude) const {
    double cur = max_clamp_.load(std::memory_order_relaxed);
    while (magnitude > cur &&
           !max_clamp_.compare_exchange_weak(cur, magnitude, std::memory_order_relaxed)) {
    }
  }

  TanhMap map_;
  std::vector<Panel> panels_;
  std::vector<double> knots_;
  double left_value_ = 0.0;
  double right_value_ = 0.0;
  bool clamp01_ = false;
  mutable std::atomic<double> max_clamp_{0.0};
};

namespace detail {

// Chebyshev interpolation coefficients on the Lobatto grid of a panel,
// stored so that sum_k c_k T_k(t) is the interpolant.
inline std::vector<double> cheb_coeffs(const std::vector<double>& values) {
  const std::size_t d = values.size() - 1;
  std::vector<double> c(d + 1, 0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    double s = 0.5 * (values[0] + (k % 2 == 0 ? values[d] : -values[d]));
    for (std::size_t j = 1; j < d; ++j)
      s += values[j] * std::cos(pi * static_cast<double>(j * k) / static_cast<double>(d));
    c[k] = 2.0 * s / static_cast<double>(d);
  }
  c[0] *= 0.5;
  c[d] *= 0.5;
  return c;
}

// Term-by-term antiderivative: B' = sum c_k T_k with B(-1) = 0, scaled by the
// panel half-width. b_k = (c_(k-1) - c_(k+1)) / (2k).
inline std::vector<double> cheb_antiderivative_coeffs(const std::vector<double>& c,
                                                      double half_width) {
  const std::size_t d = c.size() - 1;
  std::vector<double> b(d + 2, 0.0);
  auto cc = [&](std::size_t k) { return k <= d ? c[k] : 0.0; };
  for (std::size_t k = 1; k <= d + 1; ++k)
    b[k] = half_width * (cc(k - 1) - cc(k + 1)) / (2.0 * static_cast<double>(k));
  double at_left = 0.0;  // B(-1) = sum b_k (-1)^k
  for (std::size_t k = 0; k <= d + 1; ++k) at_left += (k % 2 == 0 ? b[k] : -b[k]);
  b[0] -= at_left;
  return b;
}

struct PanelFit {
  std::vector<double> coef;
  double err;  // estimated max interpolation error on the panel
};

template <class Fn>
PanelFit fit_panel(const Fn& h, double lo, double hi, int degree) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::vector<double> values(static_cast<std::size_t>(degree) + 1);
  for (int j = 0; j <= degree; ++j)
    values[static_cast<std::size_t>(j)] = h(mid + half * std::cos(pi * j / degree));
  PanelFit fit{cheb_coeffs(values), 0.0};
  const std::size_t d = fit.coef.size() - 1;
  fit.err = std::abs(fit.coef[d]) + std::abs(fit.coef[d - 1]) + std::abs(fit.coef[d - 2]);
  // Off-node probe guards against aliasing on under-resolved panels.
  for (double t : {-0.83, 0.11, 0.57}) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = fit.coef.size(); k-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + fit.coef[k];
      b2 = b1;
      b1 = b0;
    }
    const double interp = t * b1 - b2 + fit.coef[0];
    fit.err = std::max(fit.err, std::abs(interp - h(mid + half * t)));
  }
  return fit;
}

}  // namespace detail

// Builds the cumulative integral of integrand_x over [x_lo, x_hi] as a
// panelized Chebyshev series in the tanh-mapped coordinate, refining panels
// dyadically until the integrand fit meets the tolerance. breakpoints mark
// known kinks (the SEP cusp at mu); panels never straddle them.
inline ChebApprox build_antiderivative_table(const std::function<double(double)>& integrand_x,
                                             const TanhMap& map, double x_lo, double x_hi,
                                             std::vector<double> breakpoints,
                                             const ChebBuildOptions& opt = {},
                                             bool clamp01 = false) {
  if (!(x_hi > x_lo)) throw std::invalid_argument("build_antiderivative_table: empty domain");
  const double u_lo = map.to_u(x_lo);
  const double u_hi = map.to_u(x_hi);
  if (!(u_lo > -1.0 && u_hi < 1.0 && u_hi > u_lo))
    throw std::invalid_argument("build_antiderivative_table: domain exceeds map range");

  std::vector<double> edges{u_lo};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double bx : breakpoints) {
    const double bu = map.to_u(bx);
    if (bu > edges.back() + 1e-14 && bu < u_hi - 1e-14) edges.push_back(bu);
  }
  edges.push_back(u_hi);

  auto mapped = [&](double u) { return integrand_x(map.to_x(u)) * map.dxdu(u); };

  // Pointwise target for the integrand fit; panel contributions to the
  // integral are fit error times panel width, so this bounds the total.
  const double tol_uniform = opt.tol / (u_hi - u_lo);

  struct Job {
    double lo, hi;
    int depth;
  };
  std::vector<ChebApprox::Panel> panels;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    std::vector<Job> stack;
    const double w = (edges[e + 1] - edges[e]) / opt.initial_split;
    for (int s = opt.initial_split; s-- > 0;)
      stack.push_back({edges[e] + s * w, s + 1 == opt.initial_split ? edges[e + 1]
                                                                    : edges[e] + (s + 1) * w,
                       0});
    while (!stack.empty()) {
      const Job job = stack.back();
      stack.pop_back();
      auto fit = detail::fit_panel(mapped, job.lo, job.hi, opt.degree);
      if (fit.err > tol_uniform && job.depth < opt.max_depth) {
        const double mid = 0.5 * (job.lo + job.hi);
        stack.push_back({mid, job.hi, job.depth + 1});
        stack.push_back({job.lo, mid, job.depth + 1});
        continue;
      }
      panels.push_back({job.lo, job.hi, std::move(fit.coef)});
    }
  }
  std::sort(panels.begin(), panels.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });

  // Integrate each panel and chain the constants left to right.
  double running = 0.0;
  for (auto& p : panels) {
    p.coef = detail::cheb_antiderivative_coeffs(p.coef, 0.5 * (p.hi - p.lo));
    p.coef[0] += running;
    double at_right = 0.0;
    for (double c : p.coef) at_right += c;
    running = at_right;
  }
  return ChebApprox(map, std::move(panels), clamp01);
}

// Antiderivative of an existing table: refits the stored function times the
// chain-rule factor of the tanh map on the same panels, then integrates the
// coefficients.
inline ChebApprox antiderivative(const ChebApprox& f) {
  const TanhMap& map = f.map();
  std::vector<ChebApprox::Panel> panels;
  panels.reserve(f.panel_count());
  double running = 0.0;
  for (const auto& src : f.panels()) {
    auto h = [&](double u) {
      // u strictly inside (-1,1) on panel interiors; endpoints of the
      // outermost panels are still mapped finitely by construction.
      return f(map.to_x(u)) * map.dxdu(u);
    };
    auto fit = detail::fit_panel(h, src.lo, src.hi, static_cast<int>(src.coef.size()) + 8);
    auto coef = detail::cheb_antiderivative_coeffs(fit.coef, 0.5 * (src.hi - src.lo));
    coef[0] += running;
    double at_right = 0.0;
    for (double c : coef) at_right += c;
    running = at_right;
    panels.push_back({src.lo, src.hi, std::move(coef)});
  }
  return ChebApprox(map, std::move(panels), false);
}

namespace detail {

// z with symmetric exponential-power tail mass below eps, from the bound
// Q(a, T) <= 2 T^(a-1) e^(-T) / Gamma(a). Conservative is fine here; the
// cutoff only positions the outermost panels.
inline double ep_tail_halfwidth(double alpha, double eps) {
  const double a = 1.0 / alpha;
  const double target = std::log(eps / 2.0) + std::lgamma(a);
  double t = a + 10.0 * std::sqrt(a) + 50.0;
  for (int i = 0; i < 200; ++i) {
    const double h = (a - 1.0) * std::log(t) - t - target;
    if (h <= 0.0) break;
    const double dh = (a - 1.0) / t - 1.0;
    t -= h / dh;
  }
  return 1.05 * std::pow(alpha * t, 1.0 / alpha) + 1.0;
}

inline TanhMap make_map(double center, double base_scale, double x_lo, double x_hi) {
  // Keep mapped endpoints comfortably inside the representable u-range.
  const double reach = std::max(std::abs(x_lo - center), std::abs(x_hi - center));
  return {center, std::max(base_scale, reach / 12.0)};
}

}  // namespace detail

// Cumulative distribution function of a SEP law as a Chebyshev table:
// F(y) = integral of the density up to y. Clamped to [0,1]; accurate to
// roughly opt.tol plus the neglected tail mass (kept below opt.tol / 10).
inline ChebApprox build_cdf(const SepParams& p, const ChebBuildOptions& opt = {}) {
  p.validate();
  const double eps_tail = std::min(opt.tol * 0.1, 1e-10);
  const double z_cut = detail::ep_tail_halfwidth(p.alpha, eps_tail);
  const double x_lo = p.mu - z_cut * p.sigma;
  const double x_hi = p.mu + z_cut * p.sigma;
  const TanhMap map = detail::make_map(p.mu, 5.0 * p.sigma, x_lo, x_hi);
  auto table = build_antiderivative_table([&](double x) { return sep_pdf(x, p); }, map,
                                          x_lo, x_hi, {p.mu}, opt, true);
  if (std::abs(table.unclamped_limit() - 1.0) > 1e-7)
    throw std::runtime_error("build_cdf: mass deviates from 1 beyond tolerance");
  return table;
}

// Censoring integral of the likelihood: y -> integral_{-inf}^{y} (1-F(v))^k g(v) dv,
// with F the dealer SEP cdf (prebuilt table) and g the client Gaussian density.
inline ChebApprox build_survival_power_integral(const SepParams& p, const ClientParams& c,
                                                int k, const ChebApprox& cdf,
                                                const ChebBuildOptions& opt = {}) {
  p.validate();
  c.validate();
  if (k < 0 || k > 5)
    throw std::domain_error("build_survival_power_integral: k must be in 0..5");
  const double x_lo = c.nu - 7.5 * c.tau;
  const double x_hi = c.nu + 7.5 * c.tau;
  const TanhMap map =
      detail::make_map(c.nu, std::max(5.0 * p.sigma, 5.0 * c.tau), x_lo, x_hi);
  auto integrand = [&](double v) {
    const double s = 1.0 - cdf(v);
    double sk = 1.0;
    for (int i = 0; i < k; ++i) sk *= s;
    return sk * gaussian_pdf(v, c.nu, c.tau);
  };
  std::vector<double> breaks;
  if (p.mu > x_lo && p.mu < x_hi) breaks.push_back(p.mu);
  return build_antiderivative_table(integrand, map, x_lo, x_hi, std::move(breaks), opt, true);
}

inline ChebApprox build_survival_power_integral(const SepParams& p, const ClientParams& c,
                                                int k, const ChebBuildOptions& opt = {}) {
  return build_survival_power_integral(p, c, k, build_cdf(p, opt), opt);
}

// Companion integral used by the covered-outcome likelihood in its direct
// form: y -> integral_{-inf}^{y} (1 - G(w)) f(w) dw.
inline ChebApprox build_win_mass_integral(const SepParams& p, const ClientParams& c,
                                          const ChebBuildOptions& opt = {}) {
  p.validate();
  c.validate();
  const double eps_tail = std::min(opt.tol * 0.1, 1e-10);
  const double z_cut = detail::ep_tail_halfwidth(p.alpha, eps_tail);
  const double x_lo = p.mu - z_cut * p.sigma;
  // The survival factor of the client Gaussian kills the integrand well
  // before the SEP right tail does.
  double x_hi = std::min(p.mu + z_cut * p.sigma, c.nu + 8.5 * c.tau);
  if (x_hi < x_lo + p.sigma) x_hi = x_lo + p.sigma;
  const TanhMap map =
      detail::make_map(p.mu, std::max(5.0 * p.sigma, 5.0 * c.tau), x_lo, x_hi);
  auto integrand = [&](double w) {
    return (1.0 - gaussian_cdf(w, c.nu, c.tau)) * sep_pdf(w, p);
  };
  std::vector<double> breaks;
  if (p.mu > x_lo && p.mu < x_hi) breaks.push_back(p.mu);
  return build_antiderivative_table(integrand, map, x_lo, x_hi, std::move(breaks), opt, true);
}

}  // namespace rfq
