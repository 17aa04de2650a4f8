#ifndef BITEMP_NORMALIZATION_HPP_
#define BITEMP_NORMALIZATION_HPP_

#include <span>

#include "bitemp/common.hpp"

namespace bitemp {

// Absolute tolerance on |sum_i exp_t(a_i - lambda) - 1| that a solver result
// must satisfy.
inline constexpr double kNormTol = 1e-10;

struct NormalizationResult {
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |sum_i exp_t(a_i - lambda) - 1|
};

/// Finds the normalization value lambda of the tempered softmax by bisection.
/// The map lambda -> sum_i exp_t(a_i - lambda) is nonincreasing and brackets
/// the root in [max(a), max(a) - log_t(1/k)]. Works for any t >= 0.
///
/// The search runs until the bracket width drops below 1e-14 * (1 + |lambda|)
/// or 200 iterations; throws ConvergenceError if the residual still exceeds
/// `tol`, std::invalid_argument for bad input (k < 2, non-finite entries).
NormalizationResult lambda_binary_search(std::span<const double> a, double t,
                                         double tol = kNormTol);

/// Fixed-point iteration for lambda, t > 1 only:
///   mu = max(a); a~ = a - mu
///   repeat: Z = sum_i exp_t(a~_i); a~ = Z^(1-t) (a - mu)
///   lambda = -log_t(1/Z) + mu
/// Stops when the sup-norm update drops below 1e-14 (or a few ulps of the
/// iterate, whichever is larger); throws ConvergenceError after max_iters.
NormalizationResult lambda_fixed_point(std::span<const double> a, double t,
                                       int max_iters = 100);

/// Solver dispatch used by tempered_softmax: closed-form log-sum-exp at
/// t = 1, the fixed-point iteration for t > 1 (falling back to bisection if
/// it stalls), bisection otherwise.
NormalizationResult normalize_activations(std::span<const double> a, double t,
                                          double tol = kNormTol);

/// Tempered softmax: y_i = exp_t(a_i - lambda_t(a)). Sums to 1 within
/// kNormTol. For t < 1 entries can clamp to exactly 0; for t = 1 this is the
/// standard softmax; for t > 1 the tails are polynomial and entries stay
/// strictly positive.
Vec tempered_softmax(std::span<const double> a, double t, double tol = kNormTol);

/// t-escort distribution p_i^t / sum_j p_j^t. Equals the gradient of
/// lambda_t(a) at p = tempered_softmax(a, t).
Vec escort_distribution(std::span<const double> p, double t);

/// Validates a probability vector (finite, entries in [0,1], sums to 1).
/// Throws std::invalid_argument on violation.
void check_simplex(std::span<const double> p, double sum_tol = 1e-6);

}  // namespace bitemp

#endif  // BITEMP_NORMALIZATION_HPP_
