#ifndef BITEMP_CHECKS_HPP_
#define BITEMP_CHECKS_HPP_

#include <string>
#include <vector>

namespace bitemp {

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Fixed-seed invariant suites behind `bitemp check`. Each check reports the
/// maximum observed error against its threshold.
std::vector<CheckResult> check_normalization();
std::vector<CheckResult> check_gradients();
std::vector<CheckResult> check_divergences();
std::vector<CheckResult> check_properness();

/// Runs the named suite ("normalization", "gradients", "divergences",
/// "properness", or "all"); throws std::invalid_argument for unknown names.
std::vector<CheckResult> run_check_suite(const std::string& name);

}  // namespace bitemp

#endif  // BITEMP_CHECKS_HPP_
