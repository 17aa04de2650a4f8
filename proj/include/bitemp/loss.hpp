#ifndef BITEMP_LOSS_HPP_
#define BITEMP_LOSS_HPP_

#include <span>

#include "bitemp/common.hpp"
#include "bitemp/normalization.hpp"

namespace bitemp {

/// Temperatures of the bi-tempered loss. t1 shapes the divergence (t1 < 1
/// bounds the loss), t2 shapes the transfer function (t2 > 1 gives the
/// tempered softmax a polynomial tail). t1 = t2 = 1 is the logistic loss.
struct TemperaturePair {
  double t1 = 1.0;
  double t2 = 1.0;
};

/// Enforces 0 <= t1 <= 1 <= t2 (both finite); throws std::invalid_argument.
void check_temperature_pair(const TemperaturePair& temps);

struct LossConfig {
  TemperaturePair temps;
  double label_smoothing = 0.0;  // in [0, 1); 0 = off
  double norm_tol = kNormTol;    // tolerance on the softmax normalization
};

struct LossOutput {
  double value = 0.0;  // >= 0; +infinity when t1 = 1 and the true class
                       // probability underflowed to exactly 0
  Vec probabilities;   // tempered softmax of the activations at t2
  Vec gradient;        // dL/da; entries sum to 0 (shift invariance)
};

/// Bi-tempered logistic loss of activations `a` against label distribution
/// `y`: the F_{t1} Bregman divergence between y and the t2-tempered softmax
/// of a, with its analytic gradient
///   dL/da_i = sum_j (yhat_j - y_j) yhat_j^(t2-t1) (delta_ij - escort_i)
/// where escort is the t2-escort of yhat.
LossOutput bitempered_loss(std::span<const double> a, std::span<const double> y,
                           const LossConfig& cfg);

struct BatchLossOutput {
  double mean_value = 0.0;  // mean of per-row loss values
  Matrix gradients;         // row n holds dL_n/da_n for that example alone
};

/// Row-wise loss over a batch: activations and labels are N x k matrices
/// with matching shapes. Rows are independent; the value is the empirical
/// mean of the per-row losses.
BatchLossOutput bitempered_loss_batch(const Matrix& activations,
                                      const Matrix& labels, const LossConfig& cfg);

/// Two-temperature Tsallis baseline: -log_t1 of the t2-tempered-softmax
/// probability of the one-hot class. Comparison baseline only; unlike the
/// bi-tempered loss it is not proper for t1 != 1.
double tsallis_loss(std::span<const double> a, std::span<const double> y_onehot,
                    const TemperaturePair& temps);

/// One arm of a properness probe: the activations minimizing the conditional
/// risk sum_i eta_i L(a | e_i), found by gradient descent with restarts.
struct PropernessArm {
  Vec minimizer;            // risk-minimizing activations, last coordinate 0
  Vec recovered;            // tempered softmax of the minimizer at t2
  double gap = 0.0;         // max_i |recovered_i - eta_i|
  double risk = 0.0;        // conditional risk at the minimizer
  bool converged = false;   // gradient sup-norm <= 1e-7 at the minimizer
};

struct PropernessReport {
  Vec eta;
  PropernessArm bitempered;
  PropernessArm tsallis;
  bool argmax_consistent = false;  // argmax of bi-tempered minimizer == argmax eta
};

/// Numerically minimizes the conditional risk of the bi-tempered loss and of
/// the Tsallis baseline for a class distribution eta (interior, k <= 5), and
/// reports how close the recovered distributions come to eta. A proper loss
/// recovers eta; the Tsallis baseline recovers the (1/t1)-power escort of eta
/// instead. Gradient descent: step 0.1, 10^4 iterations, `restarts` random
/// starts plus a zero start, last activation pinned to 0.
PropernessReport properness_gap(std::span<const double> eta,
                                const TemperaturePair& temps, int restarts = 5);

}  // namespace bitemp

#endif  // BITEMP_LOSS_HPP_
