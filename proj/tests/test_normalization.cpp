#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bitemp/normalization.hpp"
#include "bitemp/rng.hpp"
#include "bitemp/tempered_math.hpp"

using namespace bitemp;

namespace {

Vec random_vec(Rng& rng, std::size_t k, double lo, double hi) {
  Vec v(k);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

double softmax_sum(const Vec& a, double lambda, double t) {
  double s = 0.0;
  for (double ai : a) s += exp_t(ai - lambda, t);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("normalization");

TEST_CASE("constant activations have the symmetry closed form") {
  Rng rng(21);
  for (double t : {0.0, 0.5, 1.0, 1.3, 4.0}) {
    for (std::size_t k : {2, 3, 10, 50}) {
      const double c = rng.uniform(-5.0, 5.0);
      const Vec a(k, c);
      const double expected = c - log_t(1.0 / static_cast<double>(k), t);
      CHECK(normalize_activations(a, t).lambda ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-point closed forms") {
  // a = [0, 0], t = 4: lambda = -log_4(1/2) = (2^3 - 1)/3 = 7/3
  CHECK(lambda_binary_search(Vec{0.0, 0.0}, 4.0).lambda ==
        doctest::Approx(7.0 / 3.0).epsilon(1e-13));
  CHECK(lambda_fixed_point(Vec{0.0, 0.0}, 4.0).lambda ==
        doctest::Approx(7.0 / 3.0).epsilon(1e-13));
  // a = [1, 0], t = 1: standard log-sum-exp
  CHECK(lambda_binary_search(Vec{1.0, 0.0}, 1.0).lambda ==
        doctest::Approx(std::log(std::exp(1.0) + 1.0)).epsilon(1e-13));
}

TEST_CASE("fixed point with one dominant activation") {
  const Vec a{5.0, -1e6};
  const NormalizationResult r = lambda_fixed_point(a, 2.0);
  CHECK(r.lambda == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(r.residual <= kNormTol);
}

TEST_CASE("solvers agree for t > 1") {
  Rng rng(22);
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t k = 2 + rng.integer(9);
    const Vec a = random_vec(rng, k, -5.0, 5.0);
    for (double t : {1.05, 1.5, 2.0, 4.0}) {
      const NormalizationResult fp = lambda_fixed_point(a, t);
      const NormalizationResult bs = lambda_binary_search(a, t);
      CHECK(std::abs(fp.lambda - bs.lambda) <= 1e-8);
      CHECK(fp.residual <= kNormTol);
      CHECK(bs.residual <= kNormTol);
    }
  }
}

TEST_CASE("random 10-vector cross-solver oracle at t = 1.5") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec a = random_vec(rng, 10, -5.0, 5.0);
    CHECK(std::abs(lambda_fixed_point(a, 1.5).lambda -
                   lambda_binary_search(a, 1.5).lambda) <= 1e-8);
  }
}

TEST_CASE("fixed point rejects t <= 1 and reports non-convergence") {
  CHECK_THROWS_AS(lambda_fixed_point(Vec{1.0, 0.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_fixed_point(Vec{3.0, 1.0, -2.0}, 4.0, 1), ConvergenceError);
  try {
    lambda_fixed_point(Vec{3.0, 1.0, -2.0}, 4.0, 1);
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 1);
    CHECK(std::isfinite(e.residual()));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(lambda_binary_search(Vec{1.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(lambda_binary_search(Vec{1.0, std::nan("")}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(tempered_softmax(Vec{}, 1.0), std::invalid_argument);
}

TEST_CASE("tempered softmax examples") {
  const Vec quarter = tempered_softmax(Vec{0.0, 0.0, 0.0, 0.0}, 2.0);
  for (double p : quarter) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  const Vec logistic = tempered_softmax(Vec{1.0, 0.0}, 1.0);
  const double e = std::exp(1.0);
  CHECK(logistic[0] == doctest::Approx(e / (1.0 + e)).epsilon(1e-13));
  CHECK(logistic[1] == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-13));
}

TEST_CASE("clamp zeroes the minority class for t < 1") {
  // At t = 0.2 the bracket pins lambda = 10 and the second entry clamps:
  // exp_0.2(0 - 10) = [1 - 8]_+ = 0.
  const Vec p = tempered_softmax(Vec{10.0, 0.0}, 0.2);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[1] == 0.0);
}

TEST_CASE("heavy tail for t > 1 keeps the minority class alive") {
  // High-precision reference for a = [10, 0], t = 4 (bisection oracle):
  // the minority probability is ~0.3116, versus 4.5e-5 under softmax.
  const Vec heavy = tempered_softmax(Vec{10.0, 0.0}, 4.0);
  CHECK(heavy[1] == doctest::Approx(0.31156207791987741).epsilon(1e-10));
  const Vec soft = tempered_softmax(Vec{10.0, 0.0}, 1.0);
  CHECK(soft[1] == doctest::Approx(1.0 / (1.0 + std::exp(10.0))).epsilon(1e-10));
  CHECK(heavy[1] > soft[1]);
}

TEST_CASE("normalization property over random inputs") {
  Rng rng(24);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t k = 2 + rng.integer(99);
    const Vec a = random_vec(rng, k, -10.0, 10.0);
    for (double t : {0.0, 0.5, 1.0, 1.3, 2.0, 4.0}) {
      const Vec y = tempered_softmax(a, t);
      double sum = 0.0;
      for (double yi : y) {
        CHECK(yi >= 0.0);
        sum += yi;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("shift covariance of lambda and shift invariance of the softmax") {
  Rng rng(25);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + rng.integer(9);
    const Vec a = random_vec(rng, k, -4.0, 4.0);
    const double b = rng.uniform(-30.0, 30.0);
    Vec shifted = a;
    for (double& v : shifted) v += b;
    for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      const double lam = normalize_activations(a, t).lambda;
      const double lam_shifted = normalize_activations(shifted, t).lambda;
      CHECK(std::abs(lam_shifted - (lam + b)) <= 1e-9 * (1.0 + std::abs(lam + b)));
      const Vec y = tempered_softmax(a, t);
      const Vec ys = tempered_softmax(shifted, t);
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(std::abs(y[i] - ys[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("escort distribution examples") {
  const Vec uniform(5, 0.2);
  for (double t : {0.0, 0.7, 1.0, 2.3}) {
    for (double p : escort_distribution(uniform, t)) {
      CHECK(p == doctest::Approx(0.2).epsilon(1e-13));
    }
  }
  const Vec esc = escort_distribution(Vec{0.8, 0.2}, 2.0);
  CHECK(esc[0] == doctest::Approx(0.64 / 0.68).epsilon(1e-13));
  CHECK(esc[1] == doctest::Approx(0.04 / 0.68).epsilon(1e-13));
  const Vec identity = escort_distribution(Vec{0.8, 0.2}, 1.0);
  CHECK(identity[0] == doctest::Approx(0.8).epsilon(1e-13));
  CHECK_THROWS_AS(escort_distribution(Vec{0.5, 0.7}, 1.0), std::invalid_argument);
}

TEST_CASE("escort equals the gradient of lambda") {
  Rng rng(26);
  const double h = 1e-6;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 2 + rng.integer(4);
    const Vec a = random_vec(rng, k, -2.0, 2.0);
    for (double t : {0.5, 1.0, 1.5, 2.0, 4.0}) {
      const Vec esc = escort_distribution(tempered_softmax(a, t), t);
      for (std::size_t i = 0; i < k; ++i) {
        Vec up = a, down = a;
        up[i] += h;
        down[i] -= h;
        const double fd = (normalize_activations(up, t).lambda -
                           normalize_activations(down, t).lambda) /
                          (2.0 * h);
        CHECK(std::abs(fd - esc[i]) <= 1e-5);
      }
    }
  }
}

TEST_CASE("binary search sum is monotone across the bracket") {
  Rng rng(27);
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    const Vec a = random_vec(rng, 6, -3.0, 3.0);
    const double amax = *std::max_element(a.begin(), a.end());
    const double hi = amax - log_t(1.0 / 6.0, t);
    CHECK(softmax_sum(a, amax, t) >= 1.0);
    CHECK(softmax_sum(a, hi, t) <= 1.0 + 1e-12);
    double prev = softmax_sum(a, amax, t);
    for (int step = 1; step <= 10; ++step) {
      const double lambda = amax + (hi - amax) * step / 10.0;
      const double cur = softmax_sum(a, lambda, t);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_SUITE_END();
