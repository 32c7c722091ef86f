#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "perfclass/dist.hpp"
#include "perfclass/error.hpp"

namespace perfclass {

// =========================================================================
// Signal model: an MLRP-validated density pair with its crossing point
// =========================================================================

struct SignalModel {
  ContinuousDist f0;  // signal density under noncompliance
  ContinuousDist f1;  // signal density under compliance
  double tau_c = 0.0;  // unique solution of f1(x) = f0(x)

  bool operator==(const SignalModel&) const = default;
};

struct Span {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval covering all but `eps` of the mass of both densities on each
/// side; every grid in the library lives on this span.
inline Span signal_span(const ContinuousDist& f0, const ContinuousDist& f1,
                        double eps = 1e-6) {
  return {std::min(f0.quantile(eps), f1.quantile(eps)),
          std::max(f0.quantile(1.0 - eps), f1.quantile(1.0 - eps))};
}

inline Span signal_span(const SignalModel& s, double eps = 1e-6) {
  return signal_span(s.f0, s.f1, eps);
}

/// Checks the strict monotone likelihood ratio property of f1 against f0 on
/// a grid of `grid_n` points and returns the crossing point where the two
/// densities are equal. The log-ratio must increase by more than 1e-12
/// between consecutive grid points.
inline double validate_mlrp(const ContinuousDist& f0, const ContinuousDist& f1,
                            int grid_n = 2001, const NumericsConfig& cfg = {}) {
  if (!f0.full_support() || !f1.full_support())
    throw Error(Errc::invalid_parameter,
                "signal densities must have full support "
                "(uniform is not admissible)");
  if (grid_n < 100)
    throw Error(Errc::invalid_parameter, "validate_mlrp: grid_n must be >= 100");

  const Span span = signal_span(f0, f1);
  std::vector<double> ratio(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    double x = span.lo + (span.hi - span.lo) * static_cast<double>(i) /
                             (grid_n - 1);
    ratio[i] = f1.log_density(x) - f0.log_density(x);
  }
  for (int i = 0; i + 1 < grid_n; ++i) {
    if (!(ratio[i + 1] - ratio[i] > 1e-12)) {
      double xa = span.lo + (span.hi - span.lo) * static_cast<double>(i) /
                                (grid_n - 1);
      double xb = span.lo + (span.hi - span.lo) *
                                static_cast<double>(i + 1) / (grid_n - 1);
      throw Error(Errc::mlrp_violation,
                  "likelihood ratio f1/f0 is not strictly increasing on [" +
                      std::to_string(xa) + ", " + std::to_string(xb) + "]");
    }
  }
  if (!(ratio.front() < 0.0 && ratio.back() > 0.0))
    throw Error(Errc::crossing_not_found,
                "f1 - f0 has no sign change on the validation grid");

  auto log_ratio = [&](double x) {
    return f1.log_density(x) - f0.log_density(x);
  };
  return find_root(log_ratio, span.lo, span.hi, cfg);
}

inline SignalModel make_signal_model(const ContinuousDist& f0,
                                     const ContinuousDist& f1,
                                     int grid_n = 2001,
                                     const NumericsConfig& cfg = {}) {
  return SignalModel{f0, f1, validate_mlrp(f0, f1, grid_n, cfg)};
}

// =========================================================================
// Environment: cost law, rewards and the signal model
// =========================================================================

struct Environment {
  ContinuousDist cost;  // its CDF maps r * gap to the compliance probability
  double r1 = 0.0;      // reward when classified 1 (>= 0)
  double r0 = 0.0;      // penalty when classified 0 (<= 0)
  double r = 0.0;       // net stakes r1 - r0 (> 0)
  SignalModel signal;

  bool operator==(const Environment&) const = default;
};

inline Environment make_environment(const ContinuousDist& cost, double r1,
                                    double r0, const SignalModel& signal) {
  if (!std::isfinite(r1) || !std::isfinite(r0))
    throw Error(Errc::invalid_parameter, "rewards must be finite");
  if (r1 < 0.0)
    throw Error(Errc::invalid_parameter, "r1 must be nonnegative");
  if (r0 > 0.0)
    throw Error(Errc::invalid_parameter, "r0 must be nonpositive");
  double r = r1 - r0;
  if (!(r > 0.0))
    throw Error(Errc::reward, "net stakes r = r1 - r0 must be positive");
  return Environment{cost, r1, r0, r, signal};
}

}  // namespace perfclass
