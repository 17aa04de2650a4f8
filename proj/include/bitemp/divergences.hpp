#ifndef BITEMP_DIVERGENCES_HPP_
#define BITEMP_DIVERGENCES_HPP_

#include <span>
#include <string>

#include "bitemp/common.hpp"

namespace bitemp {

/// The tempered convex generator
///   F_t(y) = sum_i (y_i log_t y_i + (1 - y_i^(2-t)) / (2-t)),
/// whose gradient is the elementwise log_t. Defined on nonnegative vectors
/// with 0 log_t 0 = 0; t = 2 is rejected (the 1/(2-t) coefficient).
double tempered_generator(std::span<const double> y, double t);

/// Bregman divergence induced by F_t, in beta-divergence form:
///   sum_i ( y^(2-t)/((1-t)(2-t)) - y yhat^(1-t)/(1-t) + yhat^(2-t)/(2-t) )
/// with the KL limit at t = 1 and the Itakura-Saito limit at t = 2.
/// Nonnegative, zero iff y = yhat.
double bregman_tempered(std::span<const double> y, std::span<const double> yhat,
                        double t);

/// Named closed-form special cases of the tempered divergence.
enum class BregmanCase {
  kEuclidean,      // t = 0:  1/2 ||y - yhat||^2
  kTHalf,          // t = 1/2
  kKl,             // t = 1
  kSquaredXiRoots, // t = 3/2: 2 sum (sqrt(y) - sqrt(yhat))^2 / sqrt(yhat)
  kItakuraSaito,   // t = 2
  kInverse,        // t = 3
};

BregmanCase bregman_case_from_name(const std::string& name);
double bregman_case_temperature(BregmanCase c);

/// Direct evaluation of the named closed form (independent of
/// bregman_tempered's code path).
double bregman_special(std::span<const double> y, std::span<const double> yhat,
                       BregmanCase c);

/// Bregman divergence of the alternate generator
///   F~_t(y) = -(1/t) sum_i (log_t y_i - y_i + 1),
/// evaluated as (1/t) sum_i (log_t yhat - log_t y + (y - yhat) yhat^(-t)).
/// Equals bregman_tempered(y, yhat, t + 1); t = 0 is rejected.
double bregman_alternate(std::span<const double> y, std::span<const double> yhat,
                         double t);

/// Tsallis divergence over the simplex: -sum_i y_i log_t(yhat_i / y_i).
/// Reduces to KL at t = 1. Not a Bregman divergence of F_t.
double tsallis_divergence(std::span<const double> y, std::span<const double> yhat,
                          double t);

}  // namespace bitemp

#endif  // BITEMP_DIVERGENCES_HPP_
