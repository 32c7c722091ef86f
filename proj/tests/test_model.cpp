#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle_utils.hpp"
#include "perfclass/model.hpp"

using namespace perfclass;
using Catch::Approx;

TEST_CASE("crossing point of shifted gaussians and logistics") {
  double tau = validate_mlrp(gaussian(0.0, 1.0), gaussian(1.0, 1.0));
  CHECK(tau == Approx(0.5).margin(1e-8));

  tau = validate_mlrp(logistic(0.0, 1.0), logistic(1.0, 1.0));
  CHECK(tau == Approx(0.5).margin(1e-8));

  tau = validate_mlrp(gaussian(-0.3, 0.8), gaussian(0.9, 0.8));
  CHECK(tau == Approx(0.3).margin(1e-8));  // midpoint for equal variances
}

TEST_CASE("unequal-variance gaussians violate the strict MLRP") {
  try {
    validate_mlrp(gaussian(0.0, 1.0), gaussian(1.0, 2.0));
    FAIL("expected MLRP violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::mlrp_violation);
    CHECK(std::string(e.what()).find("[") != std::string::npos);  // interval
  }
  // identical densities: the ratio is constant, not strictly increasing
  CHECK_THROWS_AS(validate_mlrp(gaussian(0.0, 1.0), gaussian(0.0, 1.0)), Error);
  // reversed shift: ratio decreasing
  CHECK_THROWS_AS(validate_mlrp(gaussian(1.0, 1.0), gaussian(0.0, 1.0)), Error);
  // cross-family pair: gaussian tail decays faster than logistic
  CHECK_THROWS_AS(validate_mlrp(logistic(0.0, 1.0), gaussian(1.0, 1.0)), Error);
}

TEST_CASE("uniform signal densities are rejected") {
  try {
    validate_mlrp(uniform(-1.0, 1.0), gaussian(1.0, 1.0));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_parameter);
  }
  CHECK_THROWS_AS(validate_mlrp(gaussian(0.0, 1.0), uniform(0.0, 2.0)), Error);
  CHECK_THROWS_AS(validate_mlrp(gaussian(0.0, 1.0), gaussian(1.0, 1.0), 50),
                  Error);  // grid too coarse
}

TEST_CASE("signal model caches a consistent crossing point") {
  SignalModel s = make_signal_model(gaussian(0.0, 1.0), gaussian(1.0, 1.0));
  CHECK(s.tau_c == Approx(0.5).margin(1e-8));
  double d0 = s.f0.density(s.tau_c), d1 = s.f1.density(s.tau_c);
  CHECK(std::abs(d1 - d0) / d0 <= 1e-7);

  // ratio below one left of the crossing, above one right of it
  Span span = signal_span(s);
  for (int i = 0; i < 500; ++i) {
    double x = span.lo + (span.hi - span.lo) * i / 499.0;
    double ratio = s.f1.density(x) / s.f0.density(x);
    if (x < s.tau_c - 1e-9) CHECK(ratio < 1.0);
    if (x > s.tau_c + 1e-9) CHECK(ratio > 1.0);
  }
}

TEST_CASE("threshold gap is quasiconcave with peak at the crossing point") {
  SignalModel s = make_signal_model(gaussian(0.0, 1.0), gaussian(1.0, 1.0));
  auto d_gap = [&](double t) { return s.f0.cdf(t) - s.f1.cdf(t); };
  Span span = signal_span(s);
  const int n = 1000;
  double peak = d_gap(s.tau_c);
  double prev_x = span.lo, prev = d_gap(span.lo);
  for (int i = 1; i < n; ++i) {
    double x = span.lo + (span.hi - span.lo) * i / (n - 1.0);
    double cur = d_gap(x);
    if (x <= s.tau_c)
      CHECK(cur > prev);  // strictly increasing left of the peak
    else if (prev_x >= s.tau_c)
      CHECK(cur < prev);  // strictly decreasing right of it
    CHECK(cur <= peak + 1e-15);
    prev_x = x;
    prev = cur;
  }
  CHECK(peak == Approx(0.3829249225480262).margin(1e-12));
}

TEST_CASE("threshold gap vanishes in the far tails") {
  SignalModel s = make_signal_model(gaussian(0.0, 1.0), gaussian(1.0, 1.0));
  auto d_gap = [&](double t) { return s.f0.cdf(t) - s.f1.cdf(t); };
  double lo = std::min(s.f0.quantile(1e-10), s.f1.quantile(1e-10));
  double hi = std::max(s.f0.quantile(1.0 - 1e-10), s.f1.quantile(1.0 - 1e-10));
  CHECK(std::abs(d_gap(lo)) <= 1e-8);
  CHECK(std::abs(d_gap(hi)) <= 1e-8);
}

TEST_CASE("environment construction enforces the reward structure") {
  SignalModel s = make_signal_model(gaussian(0.0, 1.0), gaussian(1.0, 1.0));

  Environment env = make_environment(gaussian(0.75, 1.0), 5.0, 0.0, s);
  CHECK(env.r == 5.0);
  CHECK(env.r1 == 5.0);
  CHECK(env.r0 == 0.0);

  try {
    make_environment(gaussian(0.0, 1.0), 0.0, 0.0, s);
    FAIL("expected reward error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::reward);
  }
  CHECK_THROWS_AS(make_environment(gaussian(0.0, 1.0), -1.0, -2.0, s), Error);
  CHECK_THROWS_AS(make_environment(gaussian(0.0, 1.0), 1.0, 0.5, s), Error);

  // any continuous cost law is admissible, including uniform
  Environment u = make_environment(uniform(-1.0, 1.0), 1.0, -1.0, s);
  CHECK(u.r == 2.0);
}

TEST_CASE("signal span covers the central mass of both densities") {
  auto f0 = gaussian(0.0, 1.0), f1 = gaussian(1.0, 1.0);
  Span span = signal_span(f0, f1);
  CHECK(span.lo == Approx(f0.quantile(1e-6)).margin(1e-12));
  CHECK(span.hi == Approx(f1.quantile(1.0 - 1e-6)).margin(1e-12));
  CHECK(f0.cdf(span.lo) <= 1e-6 + 1e-12);
  CHECK(f1.cdf(span.hi) >= 1.0 - 1e-6 - 1e-12);
}
