#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace perfclass {

// Error taxonomy shared by the whole library. The CLI maps these onto its
// exit-code contract (2 = usage/config, 3 = model validation).
enum class Errc {
  invalid_parameter,     // bad scale, malformed classifier, out-of-range knob
  numerics,              // quadrature refinement budget exhausted
  bracketing,            // root finder given an interval with no sign change
  mlrp_violation,        // likelihood ratio not strictly increasing
  crossing_not_found,    // f1 - f0 never changes sign on the validation grid
  reward,                // r1 - r0 <= 0
  infeasible_gap,        // |target gap| exceeds the extremal threshold gap
  zero_gap,              // operation undefined when the gap is zero
  degenerate_objective,  // A1 == A0 and B1 == B0 up to sign: pivot undefined
  config                 // unparseable or inconsistent run configuration
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  Error(Errc code, const std::string& msg, double estimate)
      : std::runtime_error(msg), code_(code), estimate_(estimate) {}

  Errc code() const noexcept { return code_; }

  // Best available estimate when code() == Errc::numerics.
  std::optional<double> estimate() const noexcept { return estimate_; }

 private:
  Errc code_;
  std::optional<double> estimate_;
};

}  // namespace perfclass
