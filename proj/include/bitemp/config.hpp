#ifndef BITEMP_CONFIG_HPP_
#define BITEMP_CONFIG_HPP_

#include <stdexcept>
#include <string>

#include "bitemp/experiments.hpp"

namespace bitemp {

/// Invalid config file or key; the message names the offending key/line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the flat `key = value` experiment config format ('#' starts a
/// comment, blank lines ignored). Unknown keys and unparseable values raise
/// ConfigError naming the key. Keys not present keep their defaults.
///
/// Recognized keys: dataset.shape, dataset.n_train, dataset.n_val,
/// dataset.n_test, noise.kind, noise.fraction, train.learning_rate,
/// train.momentum, train.epochs, train.batch_size, train.label_smoothing,
/// temps (comma list of t1:t2 pairs), seeds, seed.master, grid.resolution,
/// grid.xmin, grid.xmax, grid.ymin, grid.ymax, threads.
ExperimentConfig parse_experiment_config(const std::string& text);

/// Reads and parses a config file; throws ConfigError (unreadable file or
/// parse failure).
ExperimentConfig load_experiment_config(const std::string& path);

/// Echo of every effective setting in config-file syntax (the content of
/// config.resolved).
std::string resolved_config_text(const ExperimentConfig& config);

}  // namespace bitemp

#endif  // BITEMP_CONFIG_HPP_
