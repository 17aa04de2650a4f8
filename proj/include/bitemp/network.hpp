#ifndef BITEMP_NETWORK_HPP_
#define BITEMP_NETWORK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bitemp/common.hpp"
#include "bitemp/loss.hpp"

namespace bitemp {

/// Layer widths of a fully-connected ReLU net: input -> hidden... -> classes.
struct NetworkSpec {
  int input_dim = 2;
  std::vector<int> hidden = {10, 5};
  int classes = 2;
};

struct NetworkParams {
  NetworkSpec spec;
  std::vector<Matrix> weights;  // weights[l] is (out_l x in_l)
  std::vector<Vec> biases;

  bool operator==(const NetworkParams& o) const;
};

/// Scaled-uniform (Glorot) init: weights uniform in
/// +- sqrt(6 / (fan_in + fan_out)), biases zero. Deterministic given seed.
NetworkParams init_network(const NetworkSpec& spec, std::uint64_t seed);

struct ForwardTrace {
  std::vector<Vec> pre;   // per hidden layer, pre-activation
  std::vector<Vec> post;  // per hidden layer, after ReLU
  Vec logits;             // final linear activations fed to the loss
};

Vec forward(const NetworkParams& params, std::span<const double> x);
ForwardTrace forward_trace(const NetworkParams& params, std::span<const double> x);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vec> biases;

  void scale(double s);
  void accumulate(const Gradients& other);
};

Gradients zero_gradients(const NetworkSpec& spec);

/// Backpropagation of the bi-tempered loss through the net for one example.
/// Returns the loss value and accumulates parameter gradients into `out`.
double backward(const NetworkParams& params, std::span<const double> x,
                std::span<const double> y, const LossConfig& cfg, Gradients& out);

struct TrainData {
  Matrix inputs;   // N x input_dim
  Matrix targets;  // N x classes (one-hot or soft)
};

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  int epochs = 200;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  LossConfig loss;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  NetworkParams params;
  std::vector<EpochStats> history;
};

/// Called after each epoch with the epoch index and the current parameters.
using EpochHook = std::function<void(int, const NetworkParams&)>;

/// SGD with momentum. Shuffling and all randomness come from cfg.seed, so
/// identical (seed, config, data) produce bit-identical results. Throws
/// ConvergenceError if the training loss turns non-finite.
TrainResult train(NetworkParams params, const TrainData& data,
                  const TrainConfig& cfg, const EpochHook& hook = nullptr);

/// Mean loss and argmax accuracy of `params` on a dataset.
EpochStats evaluate(const NetworkParams& params, const TrainData& data,
                    const LossConfig& cfg);

int predict_class(const NetworkParams& params, std::span<const double> x);

/// Text checkpoint with an architecture header and row-major matrices,
/// printed with round-trip-safe precision; save/load is lossless.
void save_checkpoint(const NetworkParams& params, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

}  // namespace bitemp

#endif  // BITEMP_NETWORK_HPP_
