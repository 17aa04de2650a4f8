#include "bitemp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "bitemp/normalization.hpp"
#include "bitemp/rng.hpp"

namespace bitemp {

namespace {

constexpr double kBlobCenterX = 2.0;
constexpr double kBlobSigma = 0.5;
// Concentric annuli with uniform radial density, separated by a gap around
// the true boundary circle. Uniform (rather than Gaussian) shells keep the
// extreme-radius points as dense as the rest of their class, so label noise
// targeted at them carries real probability mass.
constexpr double kArcInnerLo = 0.5;
constexpr double kArcInnerHi = 1.4;
constexpr double kArcOuterLo = 1.6;
constexpr double kArcOuterHi = 2.5;
constexpr double kArcBoundary = 1.5;

int env_thread_cap() {
  if (const char* env = std::getenv("BITEMP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

DataShape data_shape_from_name(const std::string& name) {
  if (name == "two_blobs") return DataShape::kTwoBlobs;
  if (name == "two_arcs") return DataShape::kTwoArcs;
  throw std::invalid_argument("unknown dataset shape: " + name);
}

std::string data_shape_name(DataShape shape) {
  return shape == DataShape::kTwoBlobs ? "two_blobs" : "two_arcs";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "small_margin") return NoiseKind::kSmallMargin;
  if (name == "large_margin") return NoiseKind::kLargeMargin;
  if (name == "random") return NoiseKind::kRandom;
  throw std::invalid_argument("unknown noise kind: " + name);
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kSmallMargin: return "small_margin";
    case NoiseKind::kLargeMargin: return "large_margin";
    case NoiseKind::kRandom: return "random";
  }
  throw std::invalid_argument("invalid noise kind");
}

Dataset2D generate_dataset(int n, std::uint64_t seed, DataShape shape,
                           const std::string& tag) {
  if (n < 4) throw std::invalid_argument("dataset needs n >= 4");
  Dataset2D d;
  d.tag = tag;
  d.points = Matrix(n, 2);
  d.labels.resize(n);
  Rng rng(seed);
  const int n0 = n / 2 + n % 2;  // class 0 gets the extra point for odd n
  for (int i = 0; i < n; ++i) {
    const int label = i < n0 ? 0 : 1;
    double x = 0.0, y = 0.0;
    if (shape == DataShape::kTwoBlobs) {
      const double cx = label == 0 ? -kBlobCenterX : kBlobCenterX;
      x = cx + kBlobSigma * rng.normal();
      y = kBlobSigma * rng.normal();
    } else {
      const double r = label == 0 ? rng.uniform(kArcInnerLo, kArcInnerHi)
                                  : rng.uniform(kArcOuterLo, kArcOuterHi);
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      x = r * std::cos(theta);
      y = r * std::sin(theta);
    }
    d.points(i, 0) = x;
    d.points(i, 1) = y;
    d.labels[i] = label;
  }
  return d;
}

double true_margin(DataShape shape, double x, double y, int label) {
  if (shape == DataShape::kTwoBlobs) {
    // True boundary is the x = 0 midline between the blob centers.
    return label == 1 ? x : -x;
  }
  const double r = std::hypot(x, y);
  return label == 1 ? r - kArcBoundary : kArcBoundary - r;
}

MarginOracle margin_oracle(DataShape shape) {
  return [shape](double x, double y, int label) {
    return true_margin(shape, x, y, label);
  };
}

Dataset2D inject_noise(const Dataset2D& d, const NoiseSpec& spec,
                       const MarginOracle& margins) {
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) {
    throw std::invalid_argument("noise fraction must be in [0, 1]");
  }
  const std::size_t n = d.size();
  // Round half away from zero.
  const std::size_t flips =
      static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(n) + 0.5));
  Dataset2D out = d;
  if (flips == 0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (spec.kind == NoiseKind::kRandom) {
    Rng rng(spec.seed);
    rng.shuffle(order);
  } else {
    if (!margins) {
      throw std::invalid_argument("margin oracle required for " +
                                  noise_kind_name(spec.kind) + " noise");
    }
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) {
      mag[i] = std::abs(margins(d.points(i, 0), d.points(i, 1), d.labels[i]));
    }
    const bool smallest_first = spec.kind == NoiseKind::kSmallMargin;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) {
                if (mag[a] != mag[b]) {
                  return smallest_first ? mag[a] < mag[b] : mag[a] > mag[b];
                }
                return a < b;
              });
  }
  for (std::size_t i = 0; i < flips; ++i) {
    out.labels[order[i]] = 1 - out.labels[order[i]];
  }
  return out;
}

Matrix boundary_grid(const NetworkParams& params, const LossConfig& cfg,
                     const Rect& bounds, int resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin)) {
    throw std::invalid_argument("degenerate grid rectangle");
  }
  check_temperature_pair(cfg.temps);
  Matrix grid(static_cast<std::size_t>(resolution) * resolution, 3);
  const double dx = (bounds.xmax - bounds.xmin) / (resolution - 1);
  const double dy = (bounds.ymax - bounds.ymin) / (resolution - 1);
  std::size_t row = 0;
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = bounds.ymin + iy * dy;
    for (int ix = 0; ix < resolution; ++ix, ++row) {
      const double x = bounds.xmin + ix * dx;
      const Vec point{x, y};
      const Vec logits = forward(params, point);
      const Vec probs = tempered_softmax(logits, cfg.temps.t2);
      grid(row, 0) = x;
      grid(row, 1) = y;
      grid(row, 2) = probs[1];
    }
  }
  return grid;
}

namespace {

TrainData to_train_data(const Dataset2D& d, int classes) {
  TrainData data;
  data.inputs = d.points;
  data.targets = Matrix(d.size(), classes);
  for (std::size_t i = 0; i < d.size(); ++i) {
    data.targets(i, d.labels[i]) = 1.0;
  }
  return data;
}

double accuracy_on(const NetworkParams& params, const Dataset2D& d) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Vec point{d.points(i, 0), d.points(i, 1)};
    if (predict_class(params, point) == d.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

// Seed streams per seed index; shared across arms so every arm sees the same
// data, noise, and initial parameters.
enum SeedStream : std::uint64_t {
  kStreamTrainData = 1000,
  kStreamValData = 2000,
  kStreamTestData = 3000,
  kStreamTrainNoise = 4000,
  kStreamValNoise = 5000,
  kStreamInit = 6000,
  kStreamShuffle = 7000,
};

ArmRunResult run_single_arm(const ExperimentConfig& config, int arm_index,
                            int seed_index) {
  ArmRunResult result;
  result.arm = arm_index;
  result.temps = config.temps[arm_index];
  result.seed = seed_index;

  const std::uint64_t master = config.master_seed;
  const auto stream = [&](SeedStream s) {
    return derive_seed(master, static_cast<std::uint64_t>(s) + seed_index);
  };

  const Dataset2D train_clean =
      generate_dataset(config.n_train, stream(kStreamTrainData), config.shape, "train");
  const Dataset2D val_clean =
      generate_dataset(config.n_val, stream(kStreamValData), config.shape, "validation");
  const Dataset2D test_clean =
      generate_dataset(config.n_test, stream(kStreamTestData), config.shape, "test");

  const MarginOracle margins = margin_oracle(config.shape);
  NoiseSpec train_noise{config.noise_kind, config.noise_fraction,
                        stream(kStreamTrainNoise)};
  NoiseSpec val_noise{config.noise_kind, config.noise_fraction,
                      stream(kStreamValNoise)};
  const Dataset2D train_noisy = inject_noise(train_clean, train_noise, margins);
  const Dataset2D val_noisy = inject_noise(val_clean, val_noise, margins);

  NetworkSpec net_spec;
  net_spec.input_dim = 2;
  net_spec.hidden = {10, 5};
  net_spec.classes = 2;
  NetworkParams params = init_network(net_spec, stream(kStreamInit));

  TrainConfig train_cfg = config.train;
  train_cfg.seed = stream(kStreamShuffle);
  train_cfg.loss.temps = config.temps[arm_index];

  const TrainData train_data = to_train_data(train_noisy, net_spec.classes);

  // Checkpoint selection: best accuracy on the noise-corrupted validation
  // split, latest epoch on ties. The noisy-val accuracy of a well-generalizing
  // model saturates at the unflipped fraction, so ties are the common case
  // and the earliest tied epoch would be a half-trained model. Epoch 0 is the
  // untrained net.
  NetworkParams best_params = params;
  double best_val_acc = accuracy_on(params, val_noisy);
  int best_epoch = 0;
  try {
    const TrainResult trained = train(
        std::move(params), train_data, train_cfg,
        [&](int epoch, const NetworkParams& p) {
          const double acc = accuracy_on(p, val_noisy);
          if (acc >= best_val_acc) {
            best_val_acc = acc;
            best_params = p;
            best_epoch = epoch;
          }
        });
    result.history = trained.history;
  } catch (const std::exception& e) {
    // Divergence (or any numeric blowup it triggers) is recorded per arm,
    // not fatal to the sweep.
    result.diverged = true;
    result.error = e.what();
    const double nan = std::nan("");
    result.acc_train_clean = nan;
    result.acc_train_noisy = nan;
    result.acc_test = nan;
    return result;
  }

  result.best_epoch = best_epoch;
  result.acc_train_clean = accuracy_on(best_params, train_clean);
  result.acc_train_noisy = accuracy_on(best_params, train_noisy);
  result.acc_test = accuracy_on(best_params, test_clean);
  if (config.grid_resolution >= 2) {
    LossConfig grid_cfg = train_cfg.loss;
    result.grid =
        boundary_grid(best_params, grid_cfg, config.grid_bounds, config.grid_resolution);
  }
  return result;
}

}  // namespace

ExperimentReport run_comparison(const ExperimentConfig& config) {
  if (config.temps.empty()) throw std::invalid_argument("no temperature arms");
  if (config.n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  for (const TemperaturePair& tp : config.temps) check_temperature_pair(tp);

  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;

  const int n_jobs = static_cast<int>(config.temps.size()) * config.n_seeds;
  report.results.resize(n_jobs);

  int n_threads = config.threads > 0 ? config.threads : env_thread_cap();
  n_threads = std::min(n_threads, n_jobs);

  std::atomic<int> next_job{0};
  const auto worker = [&]() {
    for (;;) {
      const int job = next_job.fetch_add(1);
      if (job >= n_jobs) return;
      const int arm = job / config.n_seeds;
      const int seed = job % config.n_seeds;
      report.results[job] = run_single_arm(config, arm, seed);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "arm,t1,t2,seed,acc_train_clean,acc_train_noisy,acc_test\n";
  for (const ArmRunResult& r : report.results) {
    out << r.arm << ',' << format_double(r.temps.t1) << ',' << format_double(r.temps.t2)
        << ',' << r.seed << ',' << format_double(r.acc_train_clean) << ','
        << format_double(r.acc_train_noisy) << ',' << format_double(r.acc_test) << '\n';
  }
}

void write_history_csv(std::ostream& out, const ArmRunResult& result) {
  out << "epoch,loss,acc\n";
  for (const EpochStats& e : result.history) {
    out << e.epoch << ',' << format_double(e.loss) << ',' << format_double(e.accuracy)
        << '\n';
  }
}

void write_grid_csv(std::ostream& out, const Matrix& grid) {
  out << "x,y,p1\n";
  for (std::size_t i = 0; i < grid.rows; ++i) {
    out << format_double(grid(i, 0)) << ',' << format_double(grid(i, 1)) << ','
        << format_double(grid(i, 2)) << '\n';
  }
}

}  // namespace bitemp
