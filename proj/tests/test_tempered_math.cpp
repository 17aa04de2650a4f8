#include <doctest.h>

#include <cmath>
#include <limits>

#include "bitemp/rng.hpp"
#include "bitemp/tempered_math.hpp"

using namespace bitemp;

TEST_SUITE_BEGIN("tempered_math");

TEST_CASE("log_t fixed values") {
  CHECK(log_t(1.0, 0.7) == 0.0);
  CHECK(log_t(4.0, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(log_t(std::exp(1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // x = 0 hits the finite lower bound for t < 1.
  CHECK(log_t(0.0, 0.2) == doctest::Approx(-1.25).epsilon(1e-14));
}

TEST_CASE("exp_t fixed values") {
  CHECK(exp_t(0.0, 3.7) == 1.0);
  CHECK(exp_t(2.0, 0.5) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(exp_t(-3.0, 0.5) == 0.0);
  CHECK(exp_t(0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::isinf(exp_t(1.0, 2.0)));  // pole for t > 1
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(log_t(-1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(log_t(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_t(0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(log_t(std::numeric_limits<double>::quiet_NaN(), 0.5),
                  std::domain_error);
  CHECK_THROWS_AS(log_t(std::numeric_limits<double>::infinity(), 0.5),
                  std::domain_error);
  CHECK_THROWS_AS(exp_t(std::numeric_limits<double>::quiet_NaN(), 0.5),
                  std::domain_error);
  CHECK_THROWS_AS(log_t(1.0, -0.1), std::domain_error);
  CHECK_THROWS_AS(exp_t(1.0, -2.0), std::domain_error);
}

TEST_CASE("vector ops lift the scalar ops and report the offending index") {
  const Vec ones{1.0, 1.0, 1.0};
  for (double v : log_t_vec(ones, 0.3)) CHECK(v == 0.0);
  const Vec zeros{0.0, 0.0};
  for (double v : exp_t_vec(zeros, 1.5)) CHECK(v == 1.0);
  CHECK(exp_t_vec(Vec{2.0}, 0.5)[0] == doctest::Approx(4.0).epsilon(1e-14));

  const Vec bad{1.0, -3.0};
  CHECK_THROWS_WITH_AS(log_t_vec(bad, 0.5), doctest::Contains("index 1"),
                       std::domain_error);
}

TEST_CASE("inverse property over x > 0 and 0 <= t <= 4") {
  Rng rng(7);
  for (double t : {0.0, 0.3, 0.7, 1.0, 1.3, 2.0, 4.0}) {
    // exp_t(log_t(x)) reconstructs x through u = 1 + (1-t) log_t(x) = x^(1-t).
    // Keep x^(1-t) >= 1e-3: below that the cancellation in u alone costs more
    // than the tolerance (measured eps / x^(1-t) error growth), which is a
    // conditioning limit of the composition, not of either function.
    double lo = 1e-3, hi = 1e3;
    if (t > 1.0 + kTempEps) hi = std::min(hi, std::pow(10.0, 3.0 / (t - 1.0)));
    if (t < 1.0 - kTempEps) lo = std::max(lo, std::pow(10.0, -3.0 / (1.0 - t)));
    for (int i = 0; i < 200; ++i) {
      const double x = std::exp(rng.uniform(std::log(lo), std::log(hi)));
      const double roundtrip = exp_t(log_t(x, t), t);
      CHECK(std::abs(roundtrip - x) <= 1e-12 * x);
    }
  }
}

TEST_CASE("inverse property on the exp side within the valid domain") {
  Rng rng(8);
  for (double t : {0.0, 0.3, 0.7, 1.0, 1.3, 2.0, 4.0}) {
    // footnote-1 domain: x > -1/(1-t) for t < 1; x < 1/(t-1) for t > 1
    double lo = -10.0, hi = 10.0;
    if (t < 1.0 - kTempEps) lo = -1.0 / (1.0 - t) + 1e-6;
    if (t > 1.0 + kTempEps) hi = 1.0 / (t - 1.0) - 1e-6;
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(lo, std::min(hi, 10.0));
      const double roundtrip = log_t(exp_t(x, t), t);
      CHECK(std::abs(roundtrip - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("continuity at t = 1") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0.01, 100.0);
    for (double t : {1.0 - 1e-6, 1.0 + 1e-6}) {
      CHECK(std::abs(log_t(x, t) - std::log(x)) <=
            1e-5 * std::max(1.0, std::abs(std::log(x))));
      const double arg = rng.uniform(-2.0, 2.0);
      CHECK(std::abs(exp_t(arg, t) - std::exp(arg)) <= 1e-5 * std::exp(arg));
    }
  }
}

TEST_CASE("monotonicity") {
  Rng rng(10);
  for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    for (int i = 0; i < 200; ++i) {
      double x = rng.uniform(1e-3, 50.0);
      double y = rng.uniform(1e-3, 50.0);
      if (x > y) std::swap(x, y);
      if (x == y) continue;
      CHECK(log_t(x, t) < log_t(y, t));
      double u = rng.uniform(-5.0, 0.2);
      double v = rng.uniform(-5.0, 0.2);
      if (u > v) std::swap(u, v);
      CHECK(exp_t(u, t) <= exp_t(v, t));  // equality allowed in the clamp
    }
  }
}

TEST_CASE("lower bound for t < 1") {
  Rng rng(11);
  for (double t : {0.0, 0.25, 0.5, 0.9}) {
    const double bound = -1.0 / (1.0 - t);
    for (int i = 0; i < 200; ++i) {
      const double x = std::exp(rng.uniform(std::log(1e-6), std::log(1e4)));
      CHECK(log_t(x, t) >= bound);
    }
  }
}

TEST_SUITE_END();
