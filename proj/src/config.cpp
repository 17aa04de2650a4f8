#include "bitemp/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace bitemp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for key '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for key '" + key + "': " + value);
  }
}

std::vector<TemperaturePair> parse_temps(const std::string& value) {
  std::vector<TemperaturePair> temps;
  std::istringstream list(value);
  std::string item;
  while (std::getline(list, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("bad temps entry '" + item + "' (expected t1:t2)");
    }
    TemperaturePair tp;
    tp.t1 = parse_double("temps", trim(item.substr(0, colon)));
    tp.t2 = parse_double("temps", trim(item.substr(colon + 1)));
    temps.push_back(tp);
  }
  if (temps.empty()) throw ConfigError("temps list is empty");
  return temps;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }

    try {
      if (key == "dataset.shape") {
        config.shape = data_shape_from_name(value);
      } else if (key == "dataset.n_train") {
        config.n_train = static_cast<int>(parse_int(key, value));
      } else if (key == "dataset.n_val") {
        config.n_val = static_cast<int>(parse_int(key, value));
      } else if (key == "dataset.n_test") {
        config.n_test = static_cast<int>(parse_int(key, value));
      } else if (key == "noise.kind") {
        config.noise_kind = noise_kind_from_name(value);
      } else if (key == "noise.fraction") {
        config.noise_fraction = parse_double(key, value);
      } else if (key == "train.learning_rate") {
        config.train.learning_rate = parse_double(key, value);
      } else if (key == "train.momentum") {
        config.train.momentum = parse_double(key, value);
      } else if (key == "train.epochs") {
        config.train.epochs = static_cast<int>(parse_int(key, value));
      } else if (key == "train.batch_size") {
        config.train.batch_size = static_cast<int>(parse_int(key, value));
      } else if (key == "train.label_smoothing") {
        config.train.loss.label_smoothing = parse_double(key, value);
      } else if (key == "temps") {
        config.temps = parse_temps(value);
      } else if (key == "seeds") {
        config.n_seeds = static_cast<int>(parse_int(key, value));
      } else if (key == "seed.master") {
        config.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
      } else if (key == "grid.resolution") {
        config.grid_resolution = static_cast<int>(parse_int(key, value));
      } else if (key == "grid.xmin") {
        config.grid_bounds.xmin = parse_double(key, value);
      } else if (key == "grid.xmax") {
        config.grid_bounds.xmax = parse_double(key, value);
      } else if (key == "grid.ymin") {
        config.grid_bounds.ymin = parse_double(key, value);
      } else if (key == "grid.ymax") {
        config.grid_bounds.ymax = parse_double(key, value);
      } else if (key == "threads") {
        config.threads = static_cast<int>(parse_int(key, value));
      } else {
        throw ConfigError("unknown config key '" + key + "' (line " +
                          std::to_string(line_no) + ")");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("bad value for key '" + key + "': " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

std::string resolved_config_text(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "dataset.shape = " << data_shape_name(config.shape) << "\n";
  out << "dataset.n_train = " << config.n_train << "\n";
  out << "dataset.n_val = " << config.n_val << "\n";
  out << "dataset.n_test = " << config.n_test << "\n";
  out << "noise.kind = " << noise_kind_name(config.noise_kind) << "\n";
  out << "noise.fraction = " << format_double(config.noise_fraction) << "\n";
  out << "train.learning_rate = " << format_double(config.train.learning_rate) << "\n";
  out << "train.momentum = " << format_double(config.train.momentum) << "\n";
  out << "train.epochs = " << config.train.epochs << "\n";
  out << "train.batch_size = " << config.train.batch_size << "\n";
  out << "train.label_smoothing = " << format_double(config.train.loss.label_smoothing)
      << "\n";
  out << "temps = ";
  for (std::size_t i = 0; i < config.temps.size(); ++i) {
    if (i) out << ", ";
    out << format_double(config.temps[i].t1) << ':' << format_double(config.temps[i].t2);
  }
  out << "\n";
  out << "seeds = " << config.n_seeds << "\n";
  out << "seed.master = " << config.master_seed << "\n";
  out << "grid.resolution = " << config.grid_resolution << "\n";
  out << "grid.xmin = " << format_double(config.grid_bounds.xmin) << "\n";
  out << "grid.xmax = " << format_double(config.grid_bounds.xmax) << "\n";
  out << "grid.ymin = " << format_double(config.grid_bounds.ymin) << "\n";
  out << "grid.ymax = " << format_double(config.grid_bounds.ymax) << "\n";
  out << "threads = " << config.threads << "\n";
  return out.str();
}

}  // namespace bitemp
