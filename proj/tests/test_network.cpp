#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bitemp/experiments.hpp"
#include "bitemp/network.hpp"
#include "bitemp/rng.hpp"

using namespace bitemp;

namespace {

Vec one_hot(std::size_t k, std::size_t c) {
  Vec y(k, 0.0);
  y[c] = 1.0;
  return y;
}

LossConfig config(double t1, double t2) {
  LossConfig cfg;
  cfg.temps = {t1, t2};
  return cfg;
}

// Independent forward pass used as a dual-implementation oracle.
Vec forward_oracle(const NetworkParams& p, const Vec& x) {
  Vec cur = x;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    Vec next(p.weights[l].rows, 0.0);
    for (std::size_t i = 0; i < p.weights[l].rows; ++i) {
      next[i] = p.biases[l][i];
      for (std::size_t j = 0; j < p.weights[l].cols; ++j) {
        next[i] += p.weights[l](i, j) * cur[j];
      }
      if (l + 1 < p.weights.size() && next[i] < 0.0) next[i] = 0.0;
    }
    cur = next;
  }
  return cur;
}

// Independent softmax cross-entropy backprop for the (1,1) reduction check.
struct OracleGrads {
  std::vector<Matrix> weights;
  std::vector<Vec> biases;
};

OracleGrads ce_backprop_oracle(const NetworkParams& p, const Vec& x, const Vec& y) {
  std::vector<Vec> pre, post;
  Vec cur = x;
  for (std::size_t l = 0; l + 1 < p.weights.size(); ++l) {
    Vec z(p.weights[l].rows, 0.0);
    for (std::size_t i = 0; i < p.weights[l].rows; ++i) {
      z[i] = p.biases[l][i];
      for (std::size_t j = 0; j < p.weights[l].cols; ++j) {
        z[i] += p.weights[l](i, j) * cur[j];
      }
    }
    pre.push_back(z);
    for (double& v : z) v = std::max(v, 0.0);
    post.push_back(z);
    cur = z;
  }
  const std::size_t last = p.weights.size() - 1;
  Vec logits(p.weights[last].rows, 0.0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = p.biases[last][i];
    for (std::size_t j = 0; j < p.weights[last].cols; ++j) {
      logits[i] += p.weights[last](i, j) * cur[j];
    }
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  Vec delta(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    delta[i] = std::exp(logits[i] - m) / z - y[i];
  }

  OracleGrads grads;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    grads.weights.emplace_back(p.weights[l].rows, p.weights[l].cols);
    grads.biases.emplace_back(p.biases[l].size(), 0.0);
  }
  for (std::size_t l = p.weights.size(); l-- > 0;) {
    const Vec& input = l == 0 ? x : post[l - 1];
    for (std::size_t i = 0; i < p.weights[l].rows; ++i) {
      for (std::size_t j = 0; j < p.weights[l].cols; ++j) {
        grads.weights[l](i, j) = delta[i] * input[j];
      }
      grads.biases[l][i] = delta[i];
    }
    if (l == 0) break;
    Vec prev(p.weights[l].cols, 0.0);
    for (std::size_t i = 0; i < p.weights[l].rows; ++i) {
      for (std::size_t j = 0; j < p.weights[l].cols; ++j) {
        prev[j] += delta[i] * p.weights[l](i, j);
      }
    }
    for (std::size_t j = 0; j < prev.size(); ++j) {
      if (pre[l - 1][j] <= 0.0) prev[j] = 0.0;
    }
    delta = prev;
  }
  return grads;
}

TrainData blobs_data(int n, std::uint64_t seed) {
  const Dataset2D d = generate_dataset(n, seed, DataShape::kTwoBlobs);
  TrainData data;
  data.inputs = d.points;
  data.targets = Matrix(d.size(), 2);
  for (std::size_t i = 0; i < d.size(); ++i) data.targets(i, d.labels[i]) = 1.0;
  return data;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("init shapes chain through the layer sizes and are seed-deterministic") {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {10, 5};
  spec.classes = 2;
  const NetworkParams p = init_network(spec, 7);
  REQUIRE(p.weights.size() == 3);
  CHECK(p.weights[0].rows == 10);
  CHECK(p.weights[0].cols == 2);
  CHECK(p.weights[1].rows == 5);
  CHECK(p.weights[1].cols == 10);
  CHECK(p.weights[2].rows == 2);
  CHECK(p.weights[2].cols == 5);
  for (const Vec& b : p.biases) {
    for (double v : b) CHECK(v == 0.0);
  }
  CHECK(p == init_network(spec, 7));
  CHECK_FALSE(p == init_network(spec, 8));

  NetworkSpec bad = spec;
  bad.hidden = {0};
  CHECK_THROWS_AS(init_network(bad, 1), std::invalid_argument);
}

TEST_CASE("forward of an all-zero network is the zero vector") {
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.hidden = {4};
  spec.classes = 2;
  NetworkParams p = init_network(spec, 1);
  for (Matrix& w : p.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
  const Vec logits = forward(p, Vec{0.3, -0.7, 2.0});
  for (double v : logits) CHECK(v == 0.0);
}

TEST_CASE("single linear layer reproduces W x + b") {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {};
  spec.classes = 2;
  NetworkParams p = init_network(spec, 3);
  p.weights[0](0, 0) = 1.0;
  p.weights[0](0, 1) = 2.0;
  p.weights[0](1, 0) = -1.0;
  p.weights[0](1, 1) = 0.5;
  p.biases[0] = {0.25, -0.5};
  const Vec logits = forward(p, Vec{2.0, 3.0});
  CHECK(logits[0] == doctest::Approx(8.25).epsilon(1e-15));
  CHECK(logits[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("forward matches an independently coded oracle") {
  Rng rng(51);
  NetworkSpec spec;
  spec.input_dim = 4;
  spec.hidden = {6, 3};
  spec.classes = 3;
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkParams p = init_network(spec, 100 + trial);
    Vec x(4);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const Vec got = forward(p, x);
    const Vec expected = forward_oracle(p, x);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("output-layer gradient vanishes when prediction equals label") {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {4};
  spec.classes = 2;
  const NetworkParams p = init_network(spec, 5);
  const Vec x{0.5, -1.0};
  // Use the model's own prediction as the soft label.
  const Vec logits = forward(p, x);
  const LossConfig cfg = config(1.0, 1.0);
  const Vec y = bitempered_loss(logits, one_hot(2, 0), cfg).probabilities;
  Gradients grads = zero_gradients(spec);
  backward(p, x, y, cfg, grads);
  for (double g : grads.weights.back().data) CHECK(std::abs(g) <= 1e-12);
  for (double g : grads.biases.back()) CHECK(std::abs(g) <= 1e-12);
}

TEST_CASE("backward matches finite differences at (0.5, 2)") {
  Rng rng(52);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {5, 4};
  spec.classes = 3;
  const LossConfig cfg = config(0.5, 2.0);
  const double h = 1e-6;
  int tested = 0;
  for (int trial = 0; trial < 20 && tested < 8; ++trial) {
    const NetworkParams p = init_network(spec, 200 + trial);
    Vec x(2);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const Vec y = one_hot(3, rng.integer(3));

    const ForwardTrace trace = forward_trace(p, x);
    bool near_kink = false;
    for (const Vec& layer : trace.pre) {
      for (double v : layer) near_kink |= std::abs(v) < 1e-5;
    }
    if (near_kink) continue;
    ++tested;

    Gradients grads = zero_gradients(spec);
    backward(p, x, y, cfg, grads);
    double max_rel = 0.0;
    double scale = 1e-8;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      for (std::size_t i = 0; i < p.weights[l].data.size(); ++i) {
        NetworkParams up = p, down = p;
        up.weights[l].data[i] += h;
        down.weights[l].data[i] -= h;
        Gradients sink1 = zero_gradients(spec), sink2 = zero_gradients(spec);
        const double fd =
            (backward(up, x, y, cfg, sink1) - backward(down, x, y, cfg, sink2)) /
            (2.0 * h);
        max_rel = std::max(max_rel, std::abs(fd - grads.weights[l].data[i]));
        scale = std::max({scale, std::abs(fd), std::abs(grads.weights[l].data[i])});
      }
    }
    CHECK(max_rel / scale <= 1e-4);
  }
  CHECK(tested >= 5);
}

TEST_CASE("backward at (1,1) equals a softmax cross-entropy backprop oracle") {
  Rng rng(53);
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.hidden = {6, 4};
  spec.classes = 3;
  const LossConfig cfg = config(1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const NetworkParams p = init_network(spec, 300 + trial);
    Vec x(3);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const Vec y = one_hot(3, rng.integer(3));
    Gradients grads = zero_gradients(spec);
    backward(p, x, y, cfg, grads);
    const OracleGrads oracle = ce_backprop_oracle(p, x, y);
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
      for (std::size_t i = 0; i < grads.weights[l].data.size(); ++i) {
        CHECK(std::abs(grads.weights[l].data[i] - oracle.weights[l].data[i]) <= 1e-8);
      }
      for (std::size_t i = 0; i < grads.biases[l].size(); ++i) {
        CHECK(std::abs(grads.biases[l][i] - oracle.biases[l][i]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("zero epochs leave the parameters untouched") {
  const TrainData data = blobs_data(40, 1);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {4};
  spec.classes = 2;
  const NetworkParams init = init_network(spec, 9);
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainResult result = train(init, data, cfg);
  CHECK(result.params == init);
  CHECK(result.history.empty());
}

TEST_CASE("training is bitwise deterministic given the seed") {
  const TrainData data = blobs_data(60, 2);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {6, 3};
  spec.classes = 2;
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 16;
  cfg.seed = 77;
  cfg.loss = config(0.5, 1.5);
  const NetworkParams init = init_network(spec, 10);
  const TrainResult a = train(init, data, cfg);
  const TrainResult b = train(init, data, cfg);
  CHECK(a.params == b.params);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].loss == b.history[i].loss);
    CHECK(a.history[i].accuracy == b.history[i].accuracy);
  }
}

TEST_CASE("separable blobs train to >= 0.99 accuracy with the logistic loss") {
  const TrainData data = blobs_data(200, 3);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {10, 5};
  spec.classes = 2;
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.1;
  const TrainResult result = train(init_network(spec, 11), data, cfg);
  CHECK(result.history.back().accuracy >= 0.99);
}

TEST_CASE("loss decreases from its initial value across seeds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TrainData data = blobs_data(80, 100 + seed);
    NetworkSpec spec;
    spec.input_dim = 2;
    spec.hidden = {10, 5};
    spec.classes = 2;
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.seed = seed;
    const NetworkParams init = init_network(spec, seed);
    const double initial_loss = evaluate(init, data, cfg.loss).loss;
    const TrainResult result = train(init, data, cfg);
    CHECK(result.history.back().loss < initial_loss);
  }
}

TEST_CASE("per-epoch hook sees every epoch") {
  const TrainData data = blobs_data(40, 4);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {4};
  spec.classes = 2;
  TrainConfig cfg;
  cfg.epochs = 7;
  int calls = 0;
  train(init_network(spec, 12), data, cfg,
        [&](int epoch, const NetworkParams&) {
          ++calls;
          CHECK(epoch == calls);
        });
  CHECK(calls == 7);
}

TEST_CASE("divergent learning rate aborts with a diagnostic") {
  const TrainData data = blobs_data(40, 5);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {8};
  spec.classes = 2;
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 1e8;
  CHECK_THROWS_AS(train(init_network(spec, 13), data, cfg), ConvergenceError);
}

TEST_CASE("checkpoint save/load round-trips losslessly") {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {10, 5};
  spec.classes = 2;
  const NetworkParams p = init_network(spec, 14);
  const auto path = temp_file("bitemp_ckpt_test.txt");
  save_checkpoint(p, path.string());
  const NetworkParams loaded = load_checkpoint(path.string());
  CHECK(loaded == p);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/bitemp.ckpt"), std::runtime_error);
  const auto bad = temp_file("bitemp_ckpt_bad.txt");
  {
    FILE* f = std::fopen(bad.string().c_str(), "w");
    std::fputs("not-a-checkpoint 9\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_checkpoint(bad.string()), std::runtime_error);
  std::filesystem::remove(bad);
}

TEST_CASE("end-to-end gradients at the four reference temperature settings") {
  Rng rng(54);
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {10, 5};
  spec.classes = 2;
  const TemperaturePair settings[] = {{0.2, 4.0}, {1.0, 4.0}, {0.2, 1.0}, {1.0, 1.0}};
  const double h = 1e-6;
  for (const TemperaturePair& temps : settings) {
    const LossConfig cfg = config(temps.t1, temps.t2);
    int tested = 0;
    for (int trial = 0; trial < 20 && tested < 4; ++trial) {
      const NetworkParams p = init_network(spec, 400 + trial);
      Vec x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      const Vec y = one_hot(2, rng.integer(2));
      const ForwardTrace trace = forward_trace(p, x);
      bool near_kink = false;
      for (const Vec& layer : trace.pre) {
        for (double v : layer) near_kink |= std::abs(v) < 1e-5;
      }
      if (near_kink) continue;
      ++tested;
      Gradients grads = zero_gradients(spec);
      backward(p, x, y, cfg, grads);
      double max_abs = 0.0, scale = 1e-8;
      for (std::size_t l = 0; l < p.weights.size(); ++l) {
        for (std::size_t i = 0; i < p.weights[l].data.size(); ++i) {
          NetworkParams up = p, down = p;
          up.weights[l].data[i] += h;
          down.weights[l].data[i] -= h;
          Gradients s1 = zero_gradients(spec), s2 = zero_gradients(spec);
          const double fd =
              (backward(up, x, y, cfg, s1) - backward(down, x, y, cfg, s2)) /
              (2.0 * h);
          max_abs = std::max(max_abs, std::abs(fd - grads.weights[l].data[i]));
          scale = std::max({scale, std::abs(fd), std::abs(grads.weights[l].data[i])});
        }
      }
      CHECK(max_abs / scale <= 1e-4);
    }
    CHECK(tested >= 3);
  }
}

TEST_SUITE_END();
