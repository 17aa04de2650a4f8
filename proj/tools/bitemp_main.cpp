// Command-line front end: loss evaluation, property-check suites, and the
// 2-D label-noise experiments with CSV outputs for external plotting.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitemp/checks.hpp"
#include "bitemp/common.hpp"
#include "bitemp/config.hpp"
#include "bitemp/experiments.hpp"
#include "bitemp/loss.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + item + "' in " + flag);
    }
  }
  if (values.empty()) {
    throw std::invalid_argument(flag + " needs at least one number");
  }
  return values;
}

int cmd_eval(double t1, double t2, const std::string& a_str, const std::string& y_str,
             double smoothing) {
  bitemp::LossConfig cfg;
  cfg.temps = {t1, t2};
  cfg.label_smoothing = smoothing;
  std::vector<double> a, y;
  try {
    a = parse_number_list(a_str, "--a");
    y = parse_number_list(y_str, "--y");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const bitemp::LossOutput out = bitemp::bitempered_loss(a, y, cfg);
    std::cout << "value " << bitemp::format_double(out.value) << "\n";
    std::cout << "probabilities";
    for (double p : out.probabilities) std::cout << ' ' << bitemp::format_double(p);
    std::cout << "\ngradient";
    for (double g : out.gradient) std::cout << ' ' << bitemp::format_double(g);
    std::cout << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  bitemp::ExperimentConfig config;
  try {
    config = bitemp::load_experiment_config(config_path);
  } catch (const bitemp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << out_dir << ": " << ec.message()
              << "\n";
    return kExitIo;
  }
  const auto open_out = [&](const std::string& name, std::ofstream& stream) {
    stream.open(std::filesystem::path(out_dir) / name,
                std::ios::out | std::ios::trunc | std::ios::binary);
    if (!stream) {
      std::cerr << "cannot write " << name << " in " << out_dir << "\n";
      return false;
    }
    return true;
  };

  {
    std::ofstream resolved;
    if (!open_out("config.resolved", resolved)) return kExitIo;
    resolved << bitemp::resolved_config_text(config);
    if (!resolved.flush()) return kExitIo;
  }

  bitemp::ExperimentReport report;
  try {
    report = bitemp::run_comparison(config);
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kExitUsage;
  }

  {
    std::ofstream csv;
    if (!open_out("report.csv", csv)) return kExitIo;
    bitemp::write_report_csv(csv, report);
    if (!csv.flush()) return kExitIo;
  }
  for (const bitemp::ArmRunResult& r : report.results) {
    const std::string suffix =
        std::to_string(r.arm) + "_" + std::to_string(r.seed) + ".csv";
    std::ofstream hist;
    if (!open_out("history_" + suffix, hist)) return kExitIo;
    bitemp::write_history_csv(hist, r);
    if (!hist.flush()) return kExitIo;
    if (r.grid.rows > 0) {
      std::ofstream grid;
      if (!open_out("grid_" + suffix, grid)) return kExitIo;
      bitemp::write_grid_csv(grid, r.grid);
      if (!grid.flush()) return kExitIo;
    }
  }

  std::cout << "wrote report for " << config.temps.size() << " arms x "
            << config.n_seeds << " seeds to " << out_dir << " ("
            << bitemp::format_double(report.runtime_seconds) << " s)\n";
  for (const bitemp::ArmRunResult& r : report.results) {
    if (r.diverged) {
      std::cout << "arm " << r.arm << " seed " << r.seed << " diverged: " << r.error
                << "\n";
    }
  }
  return kExitOk;
}

int cmd_check(const std::string& suite) {
  std::vector<bitemp::CheckResult> results;
  try {
    results = bitemp::run_check_suite(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  bool all_pass = true;
  for (const bitemp::CheckResult& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << ": max error "
              << bitemp::format_double(r.max_error) << " (threshold "
              << bitemp::format_double(r.threshold) << ")\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "all checks passed" : "CHECK FAILURES") << "\n";
  return all_pass ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-tempered logistic loss toolkit"};
  app.require_subcommand(1);

  double t1 = 1.0, t2 = 1.0, smoothing = 0.0;
  std::string a_str, y_str;
  CLI::App* eval = app.add_subcommand("eval", "evaluate the loss on one example");
  eval->add_option("--t1", t1, "divergence temperature, 0 <= t1 <= 1");
  eval->add_option("--t2", t2, "transfer temperature, t2 >= 1");
  eval->add_option("--a", a_str, "comma-separated activations")->required();
  eval->add_option("--y", y_str, "comma-separated label probabilities")->required();
  eval->add_option("--smoothing", smoothing, "label smoothing in [0, 1)");

  std::string config_path, out_dir;
  CLI::App* experiment = app.add_subcommand(
      "experiment",
      "run a label-noise comparison; BITEMP_THREADS caps parallel arms");
  experiment->add_option("config", config_path, "flat key = value config file")
      ->required();
  experiment->add_option("--out", out_dir, "output directory for CSV reports")
      ->required();

  std::string suite;
  CLI::App* check = app.add_subcommand("check", "run a property-check suite");
  check->add_option("suite", suite,
                    "normalization | gradients | divergences | properness | all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (eval->parsed()) return cmd_eval(t1, t2, a_str, y_str, smoothing);
  if (experiment->parsed()) return cmd_experiment(config_path, out_dir);
  if (check->parsed()) return cmd_check(suite);
  return kExitUsage;
}
