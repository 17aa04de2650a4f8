#include "bitemp/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "bitemp/divergences.hpp"
#include "bitemp/loss.hpp"
#include "bitemp/network.hpp"
#include "bitemp/normalization.hpp"
#include "bitemp/rng.hpp"
#include "bitemp/tempered_math.hpp"

namespace bitemp {

namespace {

// Gradient corruption knob for negative-control tests of the check driver
// itself: when BITEMP_CHECK_PERTURB is set, its value is added to the first
// analytic gradient component before comparison.
double check_perturbation() {
  if (const char* env = std::getenv("BITEMP_CHECK_PERTURB")) {
    return std::atof(env);
  }
  return 0.0;
}

Vec random_activations(Rng& rng, std::size_t k, double lo = -5.0, double hi = 5.0) {
  Vec a(k);
  for (double& v : a) v = rng.uniform(lo, hi);
  return a;
}

Vec random_simplex(Rng& rng, std::size_t k, double floor = 0.0) {
  Vec p(k);
  double sum = 0.0;
  for (double& v : p) {
    v = floor + rng.uniform(0.01, 1.0);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

double relative_gradient_error(const Vec& analytic, const Vec& numeric) {
  double scale = 1e-8;
  for (double g : analytic) scale = std::max(scale, std::abs(g));
  for (double g : numeric) scale = std::max(scale, std::abs(g));
  double err = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    err = std::max(err, std::abs(analytic[i] - numeric[i]));
  }
  // 1e-9 absolute floor covers the finite-difference noise of central
  // differences at h = 1e-6 on near-zero gradients.
  return std::max(err - 1e-9, 0.0) / scale;
}

}  // namespace

std::vector<CheckResult> check_normalization() {
  std::vector<CheckResult> results;
  Rng rng(101);

  {
    CheckResult r{"solver agreement (fixed point vs bisection)", 0.0, 1e-8, false};
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t k = 2 + rng.integer(49);
      const Vec a = random_activations(rng, k, -10.0, 10.0);
      for (double t : {1.05, 1.5, 2.0, 4.0}) {
        const double fp = lambda_fixed_point(a, t).lambda;
        const double bs = lambda_binary_search(a, t).lambda;
        r.max_error = std::max(r.max_error, std::abs(fp - bs));
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"tempered softmax normalization residual", 0.0, 1e-8, false};
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = 2 + rng.integer(99);
      const Vec a = random_activations(rng, k, -10.0, 10.0);
      for (double t : {0.0, 0.5, 1.0, 1.3, 2.0, 4.0}) {
        const Vec y = tempered_softmax(a, t);
        double sum = 0.0;
        for (double yi : y) sum += yi;
        r.max_error = std::max(r.max_error, std::abs(sum - 1.0));
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"lambda shift covariance", 0.0, 1e-9, false};
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t k = 2 + rng.integer(9);
      const Vec a = random_activations(rng, k);
      const double b = rng.uniform(-20.0, 20.0);
      Vec shifted = a;
      for (double& v : shifted) v += b;
      for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const double base = normalize_activations(a, t).lambda;
        const double moved = normalize_activations(shifted, t).lambda;
        r.max_error = std::max(r.max_error, std::abs(moved - base - b));
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"escort matches d(lambda)/da", 0.0, 1e-5, false};
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t k = 2 + rng.integer(4);
      const Vec a = random_activations(rng, k, -2.0, 2.0);
      for (double t : {0.5, 1.0, 1.5, 2.0}) {
        const Vec p = tempered_softmax(a, t);
        const Vec esc = escort_distribution(p, t);
        for (std::size_t i = 0; i < k; ++i) {
          Vec ap = a, am = a;
          ap[i] += h;
          am[i] -= h;
          const double fd = (normalize_activations(ap, t).lambda -
                             normalize_activations(am, t).lambda) /
                            (2.0 * h);
          r.max_error = std::max(r.max_error, std::abs(fd - esc[i]));
        }
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  return results;
}

std::vector<CheckResult> check_gradients() {
  std::vector<CheckResult> results;
  Rng rng(202);
  const double perturb = check_perturbation();
  const TemperaturePair settings[] = {{0.2, 4.0}, {0.5, 1.5}, {0.8, 1.2}, {1.0, 1.0}};

  {
    CheckResult r{"bi-tempered loss gradient vs finite differences", 0.0, 1e-5, false};
    const double h = 1e-6;
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t k = 2 + rng.integer(7);
      const Vec a = random_activations(rng, k);
      LossConfig cfg;
      cfg.temps = settings[trial % 4];
      Vec y(k, 0.0);
      if (trial % 2 == 0) {
        y[rng.integer(k)] = 1.0;
      } else {
        y = random_simplex(rng, k);
      }
      Vec analytic = bitempered_loss(a, y, cfg).gradient;
      analytic[0] += perturb;
      Vec numeric(k);
      for (std::size_t i = 0; i < k; ++i) {
        Vec ap = a, am = a;
        ap[i] += h;
        am[i] -= h;
        numeric[i] = (bitempered_loss(ap, y, cfg).value -
                      bitempered_loss(am, y, cfg).value) /
                     (2.0 * h);
      }
      r.max_error = std::max(r.max_error, relative_gradient_error(analytic, numeric));
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"network gradient vs finite differences", 0.0, 1e-4, false};
    const double h = 1e-6;
    NetworkSpec spec;
    spec.input_dim = 2;
    spec.hidden = {10, 5};
    spec.classes = 2;
    for (int trial = 0; trial < 8; ++trial) {
      NetworkParams params = init_network(spec, 900 + trial);
      const Vec x = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      Vec y(2, 0.0);
      y[rng.integer(2)] = 1.0;
      LossConfig cfg;
      cfg.temps = settings[trial % 4];

      // Stay away from ReLU kinks: skip the case if any pre-activation is
      // within 1e-5 of zero.
      const ForwardTrace trace = forward_trace(params, x);
      bool near_kink = false;
      for (const Vec& layer : trace.pre) {
        for (double v : layer) near_kink |= std::abs(v) < 1e-5;
      }
      if (near_kink) continue;

      Gradients grads = zero_gradients(spec);
      backward(params, x, y, cfg, grads);
      if (perturb != 0.0) grads.weights[0].data[0] += perturb;
      Vec analytic, numeric;
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].data.size(); ++i) {
          NetworkParams pp = params, pm = params;
          pp.weights[l].data[i] += h;
          pm.weights[l].data[i] -= h;
          Gradients unused_p = zero_gradients(spec);
          Gradients unused_m = zero_gradients(spec);
          const double lp = backward(pp, x, y, cfg, unused_p);
          const double lm = backward(pm, x, y, cfg, unused_m);
          analytic.push_back(grads.weights[l].data[i]);
          numeric.push_back((lp - lm) / (2.0 * h));
        }
      }
      r.max_error = std::max(r.max_error, relative_gradient_error(analytic, numeric));
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"logistic reduction at (1,1)", 0.0, 1e-8, false};
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t k = 2 + rng.integer(7);
      const Vec a = random_activations(rng, k);
      Vec y = random_simplex(rng, k);
      LossConfig cfg;  // (1, 1)
      const LossOutput out = bitempered_loss(a, y, cfg);
      // Independent softmax cross-entropy.
      const double m = *std::max_element(a.begin(), a.end());
      double z = 0.0;
      for (double ai : a) z += std::exp(ai - m);
      const double lse = m + std::log(z);
      double ce = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (y[i] > 0.0) ce += y[i] * (std::log(y[i]) - (a[i] - lse));
      }
      r.max_error = std::max(r.max_error, std::abs(out.value - ce));
      for (std::size_t i = 0; i < k; ++i) {
        const double g = std::exp(a[i] - lse) - y[i];
        r.max_error = std::max(r.max_error, std::abs(out.gradient[i] - g));
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  return results;
}

std::vector<CheckResult> check_divergences() {
  std::vector<CheckResult> results;
  Rng rng(303);

  {
    CheckResult r{"closed-form special cases", 0.0, 1e-10, false};
    const BregmanCase cases[] = {BregmanCase::kEuclidean,     BregmanCase::kTHalf,
                                 BregmanCase::kKl,            BregmanCase::kSquaredXiRoots,
                                 BregmanCase::kItakuraSaito,  BregmanCase::kInverse};
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t k = 1 + rng.integer(6);
      Vec y(k), yhat(k);
      for (std::size_t i = 0; i < k; ++i) {
        y[i] = rng.uniform(0.05, 3.0);
        yhat[i] = rng.uniform(0.05, 3.0);
      }
      for (BregmanCase c : cases) {
        const double special = bregman_special(y, yhat, c);
        const double general = bregman_tempered(y, yhat, bregman_case_temperature(c));
        r.max_error = std::max(r.max_error, std::abs(special - general));
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"alternate-generator temperature shift", 0.0, 1e-10, false};
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = 1 + rng.integer(5);
      Vec y(k), yhat(k);
      for (std::size_t i = 0; i < k; ++i) {
        y[i] = rng.uniform(0.1, 2.0);
        yhat[i] = rng.uniform(0.1, 2.0);
      }
      const double t = rng.uniform(0.2, 2.0);
      r.max_error = std::max(r.max_error, std::abs(bregman_alternate(y, yhat, t) -
                                                   bregman_tempered(y, yhat, t + 1.0)));
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"divergence nonnegativity", 0.0, 1e-12, false};
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t k = 2 + rng.integer(5);
      const Vec y = random_simplex(rng, k);
      const Vec yhat = random_simplex(rng, k);
      for (double t : {0.0, 0.5, 0.8, 1.0, 1.5, 3.0}) {
        const double v = bregman_tempered(y, yhat, t);
        r.max_error = std::max(r.max_error, -v);
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  {
    CheckResult r{"Corollary 1 sandwich violation", 0.0, 1e-12, false};
    const double ball_radius = 1.5;
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t k = 2 + rng.integer(5);
      for (double t : {0.0, 0.3, 0.7, 0.9}) {
        const double q = 2.0 - t;
        auto sample_in_ball = [&]() {
          Vec v(k);
          double norm_q = 0.0;
          for (double& vi : v) {
            vi = rng.uniform(0.01, 1.0);
            norm_q += std::pow(vi, q);
          }
          norm_q = std::pow(norm_q, 1.0 / q);
          const double target = ball_radius * rng.uniform(0.1, 1.0);
          for (double& vi : v) vi *= target / norm_q;
          return v;
        };
        const Vec y = sample_in_ball();
        const Vec yhat = sample_in_ball();
        const double div = bregman_tempered(y, yhat, t);
        double diff_q = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          diff_q += std::pow(std::abs(y[i] - yhat[i]), q);
        }
        const double lower =
            std::pow(diff_q, 2.0 / q) / (2.0 * std::pow(ball_radius, t));
        const double dual_p = q / (1.0 - t);
        double diff_dual = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          diff_dual += std::pow(
              std::abs(std::pow(y[i], 1.0 - t) - std::pow(yhat[i], 1.0 - t)), dual_p);
        }
        const double upper = std::pow(ball_radius, t) *
                             std::pow(diff_dual, 2.0 / dual_p) /
                             (2.0 * (1.0 - t) * (1.0 - t));
        r.max_error = std::max(r.max_error, lower - div);
        r.max_error = std::max(r.max_error, div - upper);
      }
    }
    r.pass = r.max_error <= r.threshold;
    results.push_back(r);
  }

  return results;
}

std::vector<CheckResult> check_properness() {
  std::vector<CheckResult> results;
  Rng rng(404);
  const TemperaturePair temps{0.5, 1.5};

  double max_gap = 0.0;
  int argmax_failures = 0;
  int tsallis_not_larger = 0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t k = 2 + rng.integer(3);
    const Vec eta = random_simplex(rng, k, 0.05);
    const PropernessReport report = properness_gap(eta, temps);
    max_gap = std::max(max_gap, report.bitempered.gap);
    if (!report.argmax_consistent) ++argmax_failures;
    if (report.tsallis.gap <= report.bitempered.gap) ++tsallis_not_larger;
  }

  results.push_back({"bi-tempered risk minimizer recovers eta", max_gap, 1e-3,
                     max_gap <= 1e-3});
  results.push_back({"Bayes argmax consistency failures",
                     static_cast<double>(argmax_failures), 0.0, argmax_failures == 0});
  const double tsallis_frac =
      static_cast<double>(tsallis_not_larger) / static_cast<double>(trials);
  results.push_back({"fraction where Tsallis gap not larger", tsallis_frac, 0.2,
                     tsallis_frac <= 0.2});
  return results;
}

std::vector<CheckResult> run_check_suite(const std::string& name) {
  if (name == "normalization") return check_normalization();
  if (name == "gradients") return check_gradients();
  if (name == "divergences") return check_divergences();
  if (name == "properness") return check_properness();
  if (name == "all") {
    std::vector<CheckResult> all;
    for (const auto& suite :
         {check_normalization(), check_gradients(), check_divergences(),
          check_properness()}) {
      all.insert(all.end(), suite.begin(), suite.end());
    }
    return all;
  }
  throw std::invalid_argument(
      "unknown check suite '" + name +
      "' (expected normalization, gradients, divergences, properness, or all)");
}

}  // namespace bitemp
