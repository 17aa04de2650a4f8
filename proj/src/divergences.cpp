#include "bitemp/divergences.hpp"

#include <cmath>
#include <stdexcept>

#include "bitemp/normalization.hpp"
#include "bitemp/tempered_math.hpp"

namespace bitemp {

namespace {

void check_entries(std::span<const double> v, const char* role, bool strictly_positive) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0 || (strictly_positive && v[i] == 0.0)) {
      throw std::domain_error(std::string(role) + " entry at index " + std::to_string(i) +
                              (strictly_positive ? " must be > 0" : " must be >= 0"));
    }
  }
}

void check_same_length(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw std::invalid_argument("vector lengths differ: " + std::to_string(y.size()) +
                                " vs " + std::to_string(yhat.size()));
  }
}

double kl_divergence(std::span<const double> y, std::span<const double> yhat) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) s += y[i] * std::log(y[i] / yhat[i]);
    s += yhat[i] - y[i];
  }
  return s;
}

double itakura_saito(std::span<const double> y, std::span<const double> yhat) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] / yhat[i];
    s += r - std::log(r) - 1.0;
  }
  return s;
}

}  // namespace

double tempered_generator(std::span<const double> y, double t) {
  check_temperature(t);
  if (std::abs(t - 2.0) < kTempEps) {
    throw std::invalid_argument("tempered_generator: t = 2 is unsupported");
  }
  check_entries(y, "y", /*strictly_positive=*/t > 2.0);
  double s = 0.0;
  for (double yi : y) {
    const double entropy_term = yi > 0.0 ? yi * log_t(yi, t) : 0.0;
    s += entropy_term + (1.0 - pow_nonneg(yi, 2.0 - t)) / (2.0 - t);
  }
  return s;
}

// yhat = 0 is singular only where the log_t(yhat) factor carries label mass
// (1 <= t < 2) or a negative power applies to it (t >= 2); elsewhere a zero
// entry contributes zero under the 0 log_t 0 convention.
void check_yhat_domain(std::span<const double> y, std::span<const double> yhat,
                       double t) {
  if (t >= 2.0 - kTempEps) {
    check_entries(yhat, "yhat", /*strictly_positive=*/true);
    return;
  }
  check_entries(yhat, "yhat", /*strictly_positive=*/false);
  if (t >= 1.0 - kTempEps) {
    for (std::size_t i = 0; i < yhat.size(); ++i) {
      if (yhat[i] == 0.0 && y[i] > 0.0) {
        throw std::domain_error("yhat entry at index " + std::to_string(i) +
                                " is 0 where y is positive (t >= 1)");
      }
    }
  }
}

double bregman_tempered(std::span<const double> y, std::span<const double> yhat,
                        double t) {
  check_temperature(t);
  check_same_length(y, yhat);
  check_entries(y, "y", /*strictly_positive=*/t >= 2.0 - kTempEps);
  check_yhat_domain(y, yhat, t);
  if (std::abs(t - 1.0) < kTempEps) return kl_divergence(y, yhat);
  if (std::abs(t - 2.0) < kTempEps) return itakura_saito(y, yhat);
  const double c1 = 1.0 / ((1.0 - t) * (2.0 - t));
  const double c2 = 1.0 / (1.0 - t);
  const double c3 = 1.0 / (2.0 - t);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double cross =
        y[i] > 0.0 ? c2 * y[i] * pow_nonneg(yhat[i], 1.0 - t) : 0.0;
    s += c1 * pow_nonneg(y[i], 2.0 - t) - cross + c3 * pow_nonneg(yhat[i], 2.0 - t);
  }
  return s;
}

BregmanCase bregman_case_from_name(const std::string& name) {
  if (name == "euclidean") return BregmanCase::kEuclidean;
  if (name == "t_half") return BregmanCase::kTHalf;
  if (name == "kl") return BregmanCase::kKl;
  if (name == "squared_xi_roots") return BregmanCase::kSquaredXiRoots;
  if (name == "itakura_saito") return BregmanCase::kItakuraSaito;
  if (name == "inverse") return BregmanCase::kInverse;
  throw std::invalid_argument("unknown Bregman special case: " + name);
}

double bregman_case_temperature(BregmanCase c) {
  switch (c) {
    case BregmanCase::kEuclidean: return 0.0;
    case BregmanCase::kTHalf: return 0.5;
    case BregmanCase::kKl: return 1.0;
    case BregmanCase::kSquaredXiRoots: return 1.5;
    case BregmanCase::kItakuraSaito: return 2.0;
    case BregmanCase::kInverse: return 3.0;
  }
  throw std::invalid_argument("invalid Bregman case");
}

double bregman_special(std::span<const double> y, std::span<const double> yhat,
                       BregmanCase c) {
  check_same_length(y, yhat);
  const double t = bregman_case_temperature(c);
  check_entries(y, "y", /*strictly_positive=*/t >= 2.0);
  check_yhat_domain(y, yhat, t);
  double s = 0.0;
  switch (c) {
    case BregmanCase::kEuclidean:
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        s += 0.5 * d * d;
      }
      return s;
    case BregmanCase::kTHalf:
      // Beta-divergence coefficients at t = 1/2: 4/3, 2, 2/3. The published
      // table's 3/2 coefficient on the last term is inconsistent with the
      // divergence it is a special case of.
      for (std::size_t i = 0; i < y.size(); ++i) {
        s += (4.0 / 3.0) * std::pow(y[i], 1.5) - 2.0 * y[i] * std::sqrt(yhat[i]) +
             (2.0 / 3.0) * std::pow(yhat[i], 1.5);
      }
      return s;
    case BregmanCase::kKl:
      return kl_divergence(y, yhat);
    case BregmanCase::kSquaredXiRoots:
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (yhat[i] == 0.0) continue;  // y[i] == 0 too; the limit is 0
        const double d = std::sqrt(y[i]) - std::sqrt(yhat[i]);
        s += 2.0 * d * d / std::sqrt(yhat[i]);
      }
      return s;
    case BregmanCase::kItakuraSaito:
      return itakura_saito(y, yhat);
    case BregmanCase::kInverse:
      for (std::size_t i = 0; i < y.size(); ++i) {
        s += 0.5 * (1.0 / y[i] - 2.0 / yhat[i] + y[i] / (yhat[i] * yhat[i]));
      }
      return s;
  }
  throw std::invalid_argument("invalid Bregman case");
}

double bregman_alternate(std::span<const double> y, std::span<const double> yhat,
                         double t) {
  check_temperature(t);
  if (std::abs(t) < kTempEps) {
    throw std::invalid_argument("bregman_alternate: t = 0 is unsupported");
  }
  check_same_length(y, yhat);
  check_entries(y, "y", /*strictly_positive=*/true);
  check_entries(yhat, "yhat", /*strictly_positive=*/true);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += log_t(yhat[i], t) - log_t(y[i], t) +
         (y[i] - yhat[i]) * std::pow(yhat[i], -t);
  }
  return s / t;
}

double tsallis_divergence(std::span<const double> y, std::span<const double> yhat,
                          double t) {
  check_temperature(t);
  check_same_length(y, yhat);
  check_simplex(y);
  check_simplex(yhat);
  if (t >= 1.0 - kTempEps) {
    for (std::size_t i = 0; i < yhat.size(); ++i) {
      if (yhat[i] == 0.0 && y[i] > 0.0) {
        throw std::domain_error("yhat entry at index " + std::to_string(i) +
                                " is 0 where y is positive (t >= 1)");
      }
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) s -= y[i] * log_t(yhat[i] / y[i], t);
  }
  return s;
}

}  // namespace bitemp
