#ifndef BITEMP_EXPERIMENTS_HPP_
#define BITEMP_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bitemp/common.hpp"
#include "bitemp/network.hpp"

namespace bitemp {

enum class DataShape { kTwoBlobs, kTwoArcs };

DataShape data_shape_from_name(const std::string& name);
std::string data_shape_name(DataShape shape);

/// 2-D binary classification sample.
struct Dataset2D {
  Matrix points;            // N x 2
  std::vector<int> labels;  // class indices in {0, 1}
  std::string tag;          // split tag: train / validation / test

  std::size_t size() const { return points.rows; }
};

/// Balanced synthetic dataset (class counts differ by at most one),
/// deterministic given seed.
///   two_blobs: Gaussian blobs at (-2, 0) and (2, 0), sigma 0.5.
///   two_arcs:  concentric rings of radius 1 and 2 (radial sigma 0.15),
///              uniformly spread in angle; the classes interleave around the
///              circular true boundary at radius 1.5.
Dataset2D generate_dataset(int n, std::uint64_t seed, DataShape shape,
                           const std::string& tag = "train");

/// Signed distance of a point to the generating distribution's true boundary,
/// positive on the side that matches `label`. Mislabeled-looking samples in
/// the σ-tails come out negative.
double true_margin(DataShape shape, double x, double y, int label);

/// Per-point signed margin under the noise-free boundary.
using MarginOracle = std::function<double(double x, double y, int label)>;

MarginOracle margin_oracle(DataShape shape);

enum class NoiseKind { kSmallMargin, kLargeMargin, kRandom };

NoiseKind noise_kind_from_name(const std::string& name);
std::string noise_kind_name(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kRandom;
  double fraction = 0.0;  // in [0, 1]
  std::uint64_t seed = 0;
};

/// Returns a copy of `d` with exactly round(fraction * N) labels flipped
/// (half away from zero). small_margin flips the points nearest the true
/// boundary, large_margin the farthest; ties break by ascending point index.
/// random flips a seeded uniform subset. The input dataset is untouched.
Dataset2D inject_noise(const Dataset2D& d, const NoiseSpec& spec,
                       const MarginOracle& margins);

struct Rect {
  double xmin = -3.0, xmax = 3.0;
  double ymin = -3.0, ymax = 3.0;
};

/// Class-1 tempered-softmax probability on a uniform resolution x resolution
/// lattice over `bounds` (endpoints included). Returns a (resolution^2) x 3
/// matrix of rows (x, y, p1), row-major with x varying fastest.
Matrix boundary_grid(const NetworkParams& params, const LossConfig& cfg,
                     const Rect& bounds, int resolution);

/// Trainer defaults for the 2-D comparison: full-batch SGD with momentum,
/// long enough that the slow-gradient heavy-tail arms converge too.
inline TrainConfig experiment_train_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.momentum = 0.9;
  cfg.epochs = 600;
  cfg.batch_size = 0;
  return cfg;
}

struct ExperimentConfig {
  DataShape shape = DataShape::kTwoArcs;
  int n_train = 1000;
  int n_val = 200;
  int n_test = 1000;
  NoiseKind noise_kind = NoiseKind::kRandom;
  double noise_fraction = 0.0;
  std::vector<TemperaturePair> temps = {
      {0.2, 4.0}, {1.0, 4.0}, {0.2, 1.0}, {1.0, 1.0}};
  int n_seeds = 10;
  std::uint64_t master_seed = 42;
  TrainConfig train = experiment_train_defaults();  // loss temps filled per arm
  int grid_resolution = 0;                          // 0 = no grid output
  Rect grid_bounds;
  int threads = 0;  // 0 = BITEMP_THREADS env or hardware concurrency
};

struct ArmRunResult {
  int arm = 0;
  TemperaturePair temps;
  int seed = 0;  // seed index within the sweep
  double acc_train_clean = 0.0;
  double acc_train_noisy = 0.0;
  double acc_test = 0.0;
  int best_epoch = 0;  // epoch of the selected checkpoint (0 = initial params)
  bool diverged = false;
  std::string error;
  std::vector<EpochStats> history;  // per-epoch loss/accuracy on the noisy train split
  Matrix grid;                      // empty unless grid_resolution >= 2
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ArmRunResult> results;  // arm-major, then seed index
  double runtime_seconds = 0.0;
};

/// Trains one model per temperature arm on the same noisy train split and
/// evaluates the checkpoint with the best accuracy on an identically
/// noise-corrupted validation split. Arms x seeds run independently (choose
/// parallelism with config.threads / BITEMP_THREADS); the report is
/// deterministic given the config regardless of thread count.
ExperimentReport run_comparison(const ExperimentConfig& config);

/// Stable CSV writers (fixed column order, LF line ends, round-trip-safe
/// doubles).
void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_history_csv(std::ostream& out, const ArmRunResult& result);
void write_grid_csv(std::ostream& out, const Matrix& grid);

}  // namespace bitemp

#endif  // BITEMP_EXPERIMENTS_HPP_
