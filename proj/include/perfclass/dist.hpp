#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "perfclass/error.hpp"

namespace perfclass {

// =========================================================================
// Scalar distributions
// =========================================================================

enum class DistKind { gaussian, logistic, uniform };

namespace detail {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double normal_pdf_std(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf_std(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Acklam's rational approximation for the standard normal quantile, plus one
// Halley refinement against the erfc-based CDF (~1 ulp over (0,1)).
inline double normal_quantile_std(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p > 0.5) return -normal_quantile_std(1.0 - p);

  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 6> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01, 1.0};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 5> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00, 1.0};

  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + d[4]);
  } else {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + b[5]);
  }
  // Halley step: e = Phi(x) - p, u = e / phi(x).
  double e = normal_cdf_std(x) - p;
  double u = e / normal_pdf_std(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace detail

// Uniform double in (0, 1), identical on every platform for a given engine
// state (std::uniform_real_distribution is implementation-defined; this is
// not).
inline double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// A scalar distribution with closed-form density, CDF and quantile.
/// gaussian/logistic: a = location, b = scale (> 0).
/// uniform: a, b = endpoints (a < b); supported for cost laws only.
struct ContinuousDist {
  DistKind kind = DistKind::gaussian;
  double a = 0.0;
  double b = 1.0;

  bool full_support() const { return kind != DistKind::uniform; }

  double density(double x) const {
    switch (kind) {
      case DistKind::gaussian:
        return detail::normal_pdf_std((x - a) / b) / b;
      case DistKind::logistic: {
        double z = std::abs((x - a) / b);
        double e = std::exp(-z);
        double s = 1.0 + e;
        return e / (b * s * s);
      }
      case DistKind::uniform:
        return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0;
    }
    return 0.0;
  }

  double log_density(double x) const {
    switch (kind) {
      case DistKind::gaussian: {
        double z = (x - a) / b;
        return -0.5 * z * z - std::log(b) + std::log(detail::kInvSqrt2Pi);
      }
      case DistKind::logistic: {
        double z = std::abs((x - a) / b);
        return -z - 2.0 * std::log1p(std::exp(-z)) - std::log(b);
      }
      case DistKind::uniform:
        return (x >= a && x <= b) ? -std::log(b - a)
                                  : -std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  double cdf(double x) const {
    switch (kind) {
      case DistKind::gaussian:
        return detail::normal_cdf_std((x - a) / b);
      case DistKind::logistic: {
        double z = (x - a) / b;
        if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
        double e = std::exp(z);
        return e / (1.0 + e);
      }
      case DistKind::uniform:
        return std::clamp((x - a) / (b - a), 0.0, 1.0);
    }
    return 0.0;
  }

  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(Errc::invalid_parameter,
                  "quantile: p must lie in [0, 1], got " + std::to_string(p));
    switch (kind) {
      case DistKind::gaussian:
        return a + b * detail::normal_quantile_std(p);
      case DistKind::logistic:
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        if (p >= 1.0) return std::numeric_limits<double>::infinity();
        return a + b * std::log(p / (1.0 - p));
      case DistKind::uniform:
        return a + p * (b - a);
    }
    return 0.0;
  }

  // Inverse-CDF sampling; u in (0, 1) keeps results finite.
  double sample(std::mt19937_64& gen) const { return quantile(uniform01(gen)); }

  bool operator==(const ContinuousDist&) const = default;
};

inline ContinuousDist make_dist(DistKind kind, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(Errc::invalid_parameter, "distribution parameters must be finite");
  if (kind == DistKind::uniform) {
    if (!(a < b))
      throw Error(Errc::invalid_parameter,
                  "uniform distribution requires a < b");
  } else if (!(b > 0.0)) {
    throw Error(Errc::invalid_parameter, "scale must be positive, got " +
                                             std::to_string(b));
  }
  return ContinuousDist{kind, a, b};
}

inline ContinuousDist gaussian(double mu, double sigma) {
  return make_dist(DistKind::gaussian, mu, sigma);
}
inline ContinuousDist logistic(double mu, double scale) {
  return make_dist(DistKind::logistic, mu, scale);
}
inline ContinuousDist uniform(double lo, double hi) {
  return make_dist(DistKind::uniform, lo, hi);
}

// =========================================================================
// Numerics configuration
// =========================================================================

struct NumericsConfig {
  double quad_tol = 1e-9;    // absolute quadrature tolerance
  double root_tol = 1e-10;   // bisection bracket width
  int opt_grid_n = 2001;     // coarse scan points for 1-d maximization
  double tail_mass = 1e-10;  // truncation mass per tail for improper integrals

  void validate() const {
    if (!(quad_tol > 0.0) || !(root_tol > 0.0) || !(tail_mass > 0.0))
      throw Error(Errc::invalid_parameter,
                  "numerics tolerances must be strictly positive");
    if (tail_mass >= 0.5)
      throw Error(Errc::invalid_parameter, "tail_mass must be < 0.5");
    if (opt_grid_n < 3)
      throw Error(Errc::invalid_parameter, "opt_grid_n must be >= 3");
  }

  bool operator==(const NumericsConfig&) const = default;
};

// =========================================================================
// Quadrature, root finding, 1-d maximization
// =========================================================================

/// Adaptive Simpson quadrature with interval bisection. Infinite endpoints
/// are replaced by quantile-based truncation points of `tail_refs` (the
/// densities whose mass bounds the integrand), at mass cfg.tail_mass per
/// tail. Throws Errc::numerics, carrying the running estimate, if the
/// refinement depth budget is exhausted.
template <class F>
double integrate(F&& fn, double a, double b, const NumericsConfig& cfg = {},
                 std::span<const ContinuousDist> tail_refs = {}) {
  cfg.validate();
  if (std::isnan(a) || std::isnan(b))
    throw Error(Errc::invalid_parameter, "integrate: NaN endpoint");
  if (std::isinf(a) || std::isinf(b)) {
    if (tail_refs.empty())
      throw Error(Errc::invalid_parameter,
                  "integrate: infinite endpoint needs a reference density "
                  "for truncation");
    if (std::isinf(a)) {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& d : tail_refs) lo = std::min(lo, d.quantile(cfg.tail_mass));
      a = lo;
    }
    if (std::isinf(b)) {
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& d : tail_refs)
        hi = std::max(hi, d.quantile(1.0 - cfg.tail_mass));
      b = hi;
    }
  }
  if (!(a <= b))
    throw Error(Errc::invalid_parameter, "integrate: requires a <= b");
  if (a == b) return 0.0;

  constexpr int kMaxDepth = 40;
  auto simpson = [](double lo, double hi, double flo, double fmid, double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  };

  struct Seg {
    double lo, hi, flo, fmid, fhi, estimate, tol;
    int depth;
  };

  double fa = fn(a), fm = fn(0.5 * (a + b)), fb = fn(b);
  std::vector<Seg> stack;
  stack.push_back({a, b, fa, fm, fb, simpson(a, b, fa, fm, fb),
                   cfg.quad_tol, 0});
  double total = 0.0;
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    double mid = 0.5 * (s.lo + s.hi);
    double lm = 0.5 * (s.lo + mid), rm = 0.5 * (mid + s.hi);
    double flm = fn(lm), frm = fn(rm);
    double left = simpson(s.lo, mid, s.flo, flm, s.fmid);
    double right = simpson(mid, s.hi, s.fmid, frm, s.fhi);
    double delta = left + right - s.estimate;
    if (std::abs(delta) <= 15.0 * s.tol) {
      total += left + right + delta / 15.0;
    } else if (s.depth >= kMaxDepth) {
      double estimate = total + left + right;
      for (const auto& rest : stack) estimate += rest.estimate;
      throw Error(Errc::numerics,
                  "integrate: refinement depth exhausted near x = " +
                      std::to_string(mid),
                  estimate);
    } else {
      stack.push_back({s.lo, mid, s.flo, flm, s.fmid, left, 0.5 * s.tol,
                       s.depth + 1});
      stack.push_back({mid, s.hi, s.fmid, frm, s.fhi, right, 0.5 * s.tol,
                       s.depth + 1});
    }
  }
  return total;
}

/// Bisection on [lo, hi]. Requires a sign change, or one endpoint value
/// already within root_tol of zero. Returns a point where the bracket has
/// shrunk to width <= root_tol (or an exact zero).
template <class F>
double find_root(F&& fn, double lo, double hi, const NumericsConfig& cfg = {}) {
  cfg.validate();
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(Errc::invalid_parameter, "find_root: bad interval");
  double flo = fn(lo), fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    if (std::abs(flo) <= cfg.root_tol) return lo;
    if (std::abs(fhi) <= cfg.root_tol) return hi;
    throw Error(Errc::bracketing,
                "find_root: no sign change on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  for (int it = 0; it < 200 && (hi - lo) > cfg.root_tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at double resolution
    double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct MaxResult {
  double x = 0.0;
  double value = 0.0;
  int n_optima = 1;  // refined local maxima tied with the best within 1e-10

  bool operator==(const MaxResult&) const = default;
};

namespace detail {

// Golden-section ascent on [lo, hi]; also tracks the best point evaluated.
template <class F>
void golden_refine(F& fn, double lo, double hi, double& best_x,
                   double& best_value) {
  constexpr double kInvPhi = 0.6180339887498949;
  auto consider = [&](double x, double v) {
    if (v > best_value) {
      best_value = v;
      best_x = x;
    }
  };
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = fn(c), fd = fn(d);
  consider(c, fc);
  consider(d, fd);
  double xatol = 1e-10 * (1.0 + std::abs(lo) + std::abs(hi));
  for (int it = 0; it < 200 && (hi - lo) > xatol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = fn(c);
      consider(c, fc);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = fn(d);
      consider(d, fd);
    }
  }
}

}  // namespace detail

/// Coarse scan of opt_grid_n points followed by golden-section refinement in
/// every bracket around a grid local maximum. Deterministic; on ties the
/// smallest x wins.
template <class F>
MaxResult maximize_1d(F&& fn, double lo, double hi,
                      const NumericsConfig& cfg = {}) {
  cfg.validate();
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(Errc::invalid_parameter, "maximize_1d: requires lo < hi");

  const int n = cfg.opt_grid_n;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    ys[i] = fn(xs[i]);
  }

  struct Candidate {
    double x, value;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < n; ++i) {
    bool left_ok = (i == 0) || ys[i] >= ys[i - 1];
    bool right_ok = (i == n - 1) || ys[i] >= ys[i + 1];
    if (!(left_ok && right_ok)) continue;
    double cx = xs[i], cv = ys[i];
    detail::golden_refine(fn, xs[std::max(i - 1, 0)], xs[std::min(i + 1, n - 1)],
                          cx, cv);
    candidates.push_back({cx, cv});
  }

  MaxResult best{xs[0], ys[0], 1};
  bool first = true;
  for (const auto& c : candidates) {
    if (first || c.value > best.value) {
      best.x = c.x;
      best.value = c.value;
      first = false;
    }
  }
  int tied = 0;
  for (const auto& c : candidates)
    if (c.value >= best.value - 1e-10) ++tied;
  best.n_optima = std::max(tied, 1);
  return best;
}

}  // namespace perfclass
