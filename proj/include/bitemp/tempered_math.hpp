#ifndef BITEMP_TEMPERED_MATH_HPP_
#define BITEMP_TEMPERED_MATH_HPP_

#include <span>

#include "bitemp/common.hpp"

namespace bitemp {

// Threshold on |1 - t| below which the standard log/exp branch replaces the
// power form; the power form loses precision to cancellation once 1 - t is
// this small.
inline constexpr double kTempEps = 1e-7;

/// Tempered logarithm: (x^(1-t) - 1) / (1 - t), natural log in the t -> 1
/// limit. Defined for x > 0; x = 0 is allowed for t < 1 and evaluates to the
/// finite lower bound -1/(1-t).
///
/// Throws std::domain_error for non-finite or negative x, x = 0 with t >= 1,
/// and t outside [0, inf).
double log_t(double x, double t);

/// Tempered exponential, the inverse of log_t:
/// [1 + (1-t) x]_+^(1/(1-t)), natural exp in the t -> 1 limit.
/// For t < 1 the clamp maps x <= -1/(1-t) to 0; for t > 1 the function has a
/// pole at x = 1/(t-1) and returns +infinity at or beyond it.
///
/// Throws std::domain_error for non-finite x or t outside [0, inf).
double exp_t(double x, double t);

/// Elementwise lifts. A domain violation is reported with the offending index.
Vec log_t_vec(std::span<const double> v, double t);
Vec exp_t_vec(std::span<const double> v, double t);

/// x^p for x >= 0 with the conventions 0^0 = 1 and 0^positive = 0.
double pow_nonneg(double x, double p);

/// Validates a temperature value (finite, t >= 0); throws std::domain_error.
void check_temperature(double t);

}  // namespace bitemp

#endif  // BITEMP_TEMPERED_MATH_HPP_
