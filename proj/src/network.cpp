#include "bitemp/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bitemp/rng.hpp"

namespace bitemp {

namespace {

std::vector<int> layer_sizes(const NetworkSpec& spec) {
  std::vector<int> sizes;
  sizes.push_back(spec.input_dim);
  for (int h : spec.hidden) sizes.push_back(h);
  sizes.push_back(spec.classes);
  return sizes;
}

void check_spec(const NetworkSpec& spec) {
  for (int s : layer_sizes(spec)) {
    if (s < 1) throw std::invalid_argument("layer sizes must be >= 1");
  }
  if (spec.classes < 2) throw std::invalid_argument("need at least 2 classes");
}

void matvec(const Matrix& w, const Vec& b, std::span<const double> x, Vec& out) {
  out.assign(w.rows, 0.0);
  for (std::size_t i = 0; i < w.rows; ++i) {
    double acc = b[i];
    const double* row = w.row(i);
    for (std::size_t j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

}  // namespace

bool NetworkParams::operator==(const NetworkParams& o) const {
  return weights == o.weights && biases == o.biases &&
         spec.input_dim == o.spec.input_dim && spec.hidden == o.spec.hidden &&
         spec.classes == o.spec.classes;
}

NetworkParams init_network(const NetworkSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  const std::vector<int> sizes = layer_sizes(spec);
  NetworkParams params;
  params.spec = spec;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t fan_in = sizes[l];
    const std::size_t fan_out = sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(fan_out, 0.0);
  }
  return params;
}

ForwardTrace forward_trace(const NetworkParams& params, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(params.spec.input_dim)) {
    throw std::invalid_argument("input dimension mismatch");
  }
  ForwardTrace trace;
  Vec cur(x.begin(), x.end());
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    Vec pre;
    matvec(params.weights[l], params.biases[l], cur, pre);
    Vec post(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
    trace.pre.push_back(std::move(pre));
    trace.post.push_back(std::move(post));
    cur = trace.post.back();
  }
  matvec(params.weights[n_layers - 1], params.biases[n_layers - 1], cur,
         trace.logits);
  return trace;
}

Vec forward(const NetworkParams& params, std::span<const double> x) {
  return forward_trace(params, x).logits;
}

void Gradients::scale(double s) {
  for (Matrix& w : weights)
    for (double& v : w.data) v *= s;
  for (Vec& b : biases)
    for (double& v : b) v *= s;
}

void Gradients::accumulate(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].data.size(); ++i) {
      weights[l].data[i] += other.weights[l].data[i];
    }
    for (std::size_t i = 0; i < biases[l].size(); ++i) {
      biases[l][i] += other.biases[l][i];
    }
  }
}

Gradients zero_gradients(const NetworkSpec& spec) {
  const std::vector<int> sizes = layer_sizes(spec);
  Gradients g;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    g.weights.emplace_back(sizes[l + 1], sizes[l]);
    g.biases.emplace_back(sizes[l + 1], 0.0);
  }
  return g;
}

double backward(const NetworkParams& params, std::span<const double> x,
                std::span<const double> y, const LossConfig& cfg, Gradients& out) {
  const ForwardTrace trace = forward_trace(params, x);
  const LossOutput loss = bitempered_loss(trace.logits, y, cfg);

  const std::size_t n_layers = params.weights.size();
  const Vec x_vec(x.begin(), x.end());
  Vec delta = loss.gradient;  // dL/d(pre-activation) of the current layer
  for (std::size_t l = n_layers; l-- > 0;) {
    const Vec& input = l == 0 ? x_vec : trace.post[l - 1];
    Matrix& gw = out.weights[l];
    for (std::size_t i = 0; i < gw.rows; ++i) {
      double* row = gw.row(i);
      for (std::size_t j = 0; j < gw.cols; ++j) row[j] += delta[i] * input[j];
      out.biases[l][i] += delta[i];
    }
    if (l == 0) break;
    Vec prev(params.weights[l].cols, 0.0);
    for (std::size_t i = 0; i < params.weights[l].rows; ++i) {
      const double* row = params.weights[l].row(i);
      for (std::size_t j = 0; j < params.weights[l].cols; ++j) {
        prev[j] += delta[i] * row[j];
      }
    }
    // ReLU mask of the layer below.
    for (std::size_t j = 0; j < prev.size(); ++j) {
      if (trace.pre[l - 1][j] <= 0.0) prev[j] = 0.0;
    }
    delta = std::move(prev);
  }
  return loss.value;
}

EpochStats evaluate(const NetworkParams& params, const TrainData& data,
                    const LossConfig& cfg) {
  EpochStats stats;
  double total_loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t n = 0; n < data.inputs.rows; ++n) {
    const std::span<const double> x(data.inputs.row(n), data.inputs.cols);
    const std::span<const double> y(data.targets.row(n), data.targets.cols);
    const Vec logits = forward(params, x);
    total_loss += bitempered_loss(logits, y, cfg).value;
    const std::size_t pred =
        std::distance(logits.begin(), std::max_element(logits.begin(), logits.end()));
    const std::size_t truth =
        std::distance(y.begin(), std::max_element(y.begin(), y.end()));
    if (pred == truth) ++correct;
  }
  stats.loss = total_loss / static_cast<double>(data.inputs.rows);
  stats.accuracy = static_cast<double>(correct) / static_cast<double>(data.inputs.rows);
  return stats;
}

int predict_class(const NetworkParams& params, std::span<const double> x) {
  const Vec logits = forward(params, x);
  return static_cast<int>(
      std::distance(logits.begin(), std::max_element(logits.begin(), logits.end())));
}

TrainResult train(NetworkParams params, const TrainData& data,
                  const TrainConfig& cfg, const EpochHook& hook) {
  if (data.inputs.rows == 0) throw std::invalid_argument("empty dataset");
  if (data.inputs.rows != data.targets.rows) {
    throw std::invalid_argument("input/target row counts differ");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw std::invalid_argument("momentum must be in [0, 1)");
  }
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");

  const std::size_t n = data.inputs.rows;
  const std::size_t batch =
      cfg.batch_size <= 0 ? n : std::min<std::size_t>(cfg.batch_size, n);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Gradients velocity = zero_gradients(params.spec);
  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(begin + batch, n);
      Gradients grads = zero_gradients(params.spec);
      double batch_loss = 0.0;
      for (std::size_t idx = begin; idx < end; ++idx) {
        const std::size_t row = order[idx];
        batch_loss += backward(
            params, std::span<const double>(data.inputs.row(row), data.inputs.cols),
            std::span<const double>(data.targets.row(row), data.targets.cols),
            cfg.loss, grads);
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      if (!std::isfinite(batch_loss)) {
        throw ConvergenceError("training diverged: non-finite loss at epoch " +
                                   std::to_string(epoch),
                               batch_loss, epoch);
      }
      grads.scale(inv);
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].data.size(); ++i) {
          double& v = velocity.weights[l].data[i];
          v = cfg.momentum * v - cfg.learning_rate * grads.weights[l].data[i];
          params.weights[l].data[i] += v;
        }
        for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
          double& v = velocity.biases[l][i];
          v = cfg.momentum * v - cfg.learning_rate * grads.biases[l][i];
          params.biases[l][i] += v;
        }
      }
    }
    EpochStats stats = evaluate(params, data, cfg.loss);
    stats.epoch = epoch;
    if (!std::isfinite(stats.loss)) {
      throw ConvergenceError("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch),
                             stats.loss, epoch);
    }
    result.history.push_back(stats);
    if (hook) hook(epoch, params);
  }
  result.params = std::move(params);
  return result;
}

void save_checkpoint(const NetworkParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
  out << "bitemp-checkpoint 1\n";
  out << "arch " << params.spec.input_dim;
  for (int h : params.spec.hidden) out << ' ' << h;
  out << ' ' << params.spec.classes << "\n";
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    const Matrix& w = params.weights[l];
    out << "W " << l << ' ' << w.rows << ' ' << w.cols << "\n";
    for (std::size_t i = 0; i < w.rows; ++i) {
      for (std::size_t j = 0; j < w.cols; ++j) {
        out << (j ? " " : "") << format_double(w(i, j));
      }
      out << "\n";
    }
    out << "b " << l << ' ' << params.biases[l].size() << "\n";
    for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
      out << (i ? " " : "") << format_double(params.biases[l][i]);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

NetworkParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "bitemp-checkpoint" || version != 1) {
    throw std::runtime_error("not a bitemp checkpoint (v1): " + path);
  }
  std::string tag;
  in >> tag;
  if (tag != "arch") throw std::runtime_error("checkpoint missing arch header");
  std::string rest;
  std::getline(in, rest);
  std::istringstream arch(rest);
  std::vector<int> sizes;
  int s = 0;
  while (arch >> s) sizes.push_back(s);
  if (sizes.size() < 2) throw std::runtime_error("checkpoint arch too short");

  NetworkSpec spec;
  spec.input_dim = sizes.front();
  spec.classes = sizes.back();
  spec.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
  NetworkParams params;
  params.spec = spec;

  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    std::size_t layer = 0, rows = 0, cols = 0, blen = 0;
    in >> tag >> layer >> rows >> cols;
    if (!in || tag != "W" || layer != l ||
        rows != static_cast<std::size_t>(sizes[l + 1]) ||
        cols != static_cast<std::size_t>(sizes[l])) {
      throw std::runtime_error("checkpoint weight header mismatch at layer " +
                               std::to_string(l));
    }
    Matrix w(rows, cols);
    for (double& v : w.data) in >> v;
    in >> tag >> layer >> blen;
    if (!in || tag != "b" || layer != l || blen != rows) {
      throw std::runtime_error("checkpoint bias header mismatch at layer " +
                               std::to_string(l));
    }
    Vec b(blen);
    for (double& v : b) in >> v;
    if (!in) throw std::runtime_error("checkpoint truncated at layer " + std::to_string(l));
    params.weights.push_back(std::move(w));
    params.biases.push_back(std::move(b));
  }
  return params;
}

}  // namespace bitemp
