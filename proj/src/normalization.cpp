#include "bitemp/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bitemp/tempered_math.hpp"

namespace bitemp {

namespace {

constexpr double kBracketWidthFactor = 1e-14;
constexpr double kFixedPointTol = 1e-14;
constexpr int kBisectionMaxIters = 200;

void check_activations(std::span<const double> a) {
  if (a.size() < 2) {
    throw std::invalid_argument("activation vector needs k >= 2, got k = " +
                                std::to_string(a.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) {
      throw std::invalid_argument("activation entry " + std::to_string(i) +
                                  " is not finite");
    }
  }
}

double partition_sum(std::span<const double> a, double lambda, double t) {
  double s = 0.0;
  for (double ai : a) s += exp_t(ai - lambda, t);
  return s;
}

double residual_at(std::span<const double> a, double lambda, double t) {
  return std::abs(partition_sum(a, lambda, t) - 1.0);
}

/// Exact lambda at t = 1: the standard stable log-sum-exp.
double log_sum_exp(std::span<const double> a) {
  const double m = *std::max_element(a.begin(), a.end());
  double s = 0.0;
  for (double ai : a) s += std::exp(ai - m);
  return m + std::log(s);
}

}  // namespace

void check_simplex(std::span<const double> p, double sum_tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0 || p[i] > 1.0 + 1e-12) {
      throw std::invalid_argument("probability entry " + std::to_string(i) +
                                  " outside [0, 1]");
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > sum_tol) {
    throw std::invalid_argument("probability vector sums to " + std::to_string(sum) +
                                ", expected 1");
  }
}

NormalizationResult lambda_binary_search(std::span<const double> a, double t,
                                         double tol) {
  check_temperature(t);
  check_activations(a);
  if (!(tol > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }
  const double amax = *std::max_element(a.begin(), a.end());
  // sum >= 1 at lambda = max(a) (the max term alone is exp_t(0) = 1) and
  // sum <= 1 at lambda = max(a) - log_t(1/k) (each term <= 1/k).
  double lo = amax;
  double hi = amax - log_t(1.0 / static_cast<double>(a.size()), t);
  int iters = 0;
  while (iters < kBisectionMaxIters) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < kBracketWidthFactor * (1.0 + std::abs(mid))) break;
    if (partition_sum(a, mid, t) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iters;
  }
  NormalizationResult r;
  r.lambda = 0.5 * (lo + hi);
  r.iterations = iters;
  r.residual = residual_at(a, r.lambda, t);
  if (!(r.residual <= tol)) {
    throw ConvergenceError("lambda_binary_search: residual " +
                               std::to_string(r.residual) + " exceeds tolerance",
                           r.residual, iters);
  }
  return r;
}

NormalizationResult lambda_fixed_point(std::span<const double> a, double t,
                                       int max_iters) {
  check_temperature(t);
  check_activations(a);
  if (!(t > 1.0)) {
    throw std::invalid_argument("lambda_fixed_point requires t > 1, got t = " +
                                std::to_string(t));
  }
  if (max_iters < 1) {
    throw std::invalid_argument("max_iters must be >= 1");
  }
  const double mu = *std::max_element(a.begin(), a.end());
  const std::size_t k = a.size();
  Vec shifted(k), cur(k), next(k);
  for (std::size_t i = 0; i < k; ++i) shifted[i] = a[i] - mu;
  cur = shifted;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double z = 0.0;
  for (int iter = 1; iter <= max_iters; ++iter) {
    z = 0.0;
    for (std::size_t i = 0; i < k; ++i) z += exp_t(cur[i], t);
    const double scale = std::pow(z, 1.0 - t);
    double delta = 0.0;
    double mag = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      next[i] = scale * shifted[i];
      delta = std::max(delta, std::abs(next[i] - cur[i]));
      mag = std::max(mag, std::abs(next[i]));
    }
    cur.swap(next);
    if (delta < std::max(kFixedPointTol, 4.0 * eps * mag)) {
      z = 0.0;
      for (std::size_t i = 0; i < k; ++i) z += exp_t(cur[i], t);
      NormalizationResult r;
      r.lambda = -log_t(1.0 / z, t) + mu;
      r.iterations = iter;
      r.residual = residual_at(a, r.lambda, t);
      return r;
    }
  }
  const double lambda_last = -log_t(1.0 / z, t) + mu;
  throw ConvergenceError("lambda_fixed_point: no convergence after " +
                             std::to_string(max_iters) + " iterations",
                         residual_at(a, lambda_last, t), max_iters);
}

NormalizationResult normalize_activations(std::span<const double> a, double t,
                                          double tol) {
  check_temperature(t);
  check_activations(a);
  if (std::abs(t - 1.0) <= kTempEps) {
    NormalizationResult r;
    r.lambda = log_sum_exp(a);
    r.iterations = 0;
    r.residual = residual_at(a, r.lambda, t);
    return r;
  }
  if (t > 1.0) {
    try {
      return lambda_fixed_point(a, t);
    } catch (const ConvergenceError&) {
      // Scaling iteration stalled; bisection is the verification path.
      return lambda_binary_search(a, t, tol);
    }
  }
  return lambda_binary_search(a, t, tol);
}

Vec tempered_softmax(std::span<const double> a, double t, double tol) {
  const NormalizationResult norm = normalize_activations(a, t, tol);
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    y[i] = exp_t(a[i] - norm.lambda, t);
  }
  return y;
}

Vec escort_distribution(std::span<const double> p, double t) {
  check_temperature(t);
  check_simplex(p);
  Vec w(p.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    w[i] = p[i] > 0.0 ? std::pow(p[i], t) : 0.0;
    z += w[i];
  }
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw std::domain_error("escort_distribution: degenerate normalizer");
  }
  for (double& wi : w) wi /= z;
  return w;
}

}  // namespace bitemp
