#include "bitemp/tempered_math.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bitemp {

void check_temperature(double t) {
  if (!std::isfinite(t)) {
    throw std::domain_error("temperature must be finite");
  }
  if (t < 0.0) {
    throw std::domain_error("temperature must be >= 0, got " + std::to_string(t));
  }
}

double log_t(double x, double t) {
  check_temperature(t);
  if (!std::isfinite(x)) {
    throw std::domain_error("log_t: argument must be finite");
  }
  if (x < 0.0) {
    throw std::domain_error("log_t: argument must be >= 0, got " + std::to_string(x));
  }
  if (x == 0.0) {
    if (t < 1.0) return -1.0 / (1.0 - t);
    throw std::domain_error("log_t: argument 0 requires t < 1");
  }
  const double one_minus_t = 1.0 - t;
  if (std::abs(one_minus_t) < kTempEps) {
    return std::log(x);
  }
  // expm1 evaluates x^(1-t) - 1 without cancellation when x^(1-t) is near 1.
  return std::expm1(one_minus_t * std::log(x)) / one_minus_t;
}

double exp_t(double x, double t) {
  check_temperature(t);
  if (!std::isfinite(x)) {
    throw std::domain_error("exp_t: argument must be finite");
  }
  const double one_minus_t = 1.0 - t;
  if (std::abs(one_minus_t) < kTempEps) {
    return std::exp(x);
  }
  const double u = 1.0 + one_minus_t * x;
  if (u <= 0.0) {
    // Below the clamp for t < 1; at or past the pole for t > 1.
    return t < 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(u, 1.0 / one_minus_t);
}

namespace {

template <double (*ScalarOp)(double, double)>
Vec lift(std::span<const double> v, double t, const char* name) {
  check_temperature(t);
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    try {
      out[i] = ScalarOp(v[i], t);
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(name) + " at index " + std::to_string(i) +
                              ": " + e.what());
    }
  }
  return out;
}

}  // namespace

Vec log_t_vec(std::span<const double> v, double t) {
  return lift<log_t>(v, t, "log_t_vec");
}

Vec exp_t_vec(std::span<const double> v, double t) {
  return lift<exp_t>(v, t, "exp_t_vec");
}

double pow_nonneg(double x, double p) {
  if (x == 0.0) {
    if (p == 0.0) return 1.0;
    return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(x, p);
}

}  // namespace bitemp
