// Self-contained verification suite: each check runs one acceptance
// criterion at its pinned tolerance and reports the worst violation seen.
// The tolerances live here, in code, and are not configurable.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace credence {

struct SweepRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::int64_t checks_run = 0;
  double max_violation = 0.0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_violation = 0.0;
  std::int64_t checks_run = 0;
  double seconds = 0.0;
  std::string detail;           // short human-readable note on failure
  std::vector<SweepRow> rows;   // per-n breakdown for sweep-style checks
};

struct VerifyConfig {
  std::uint64_t seed = 1;
  // Debug hook (negative control): added to every density value inside the
  // distribution check so a deliberately corrupted g fails normalization.
  double corrupt_g = 0.0;
};

CheckResult check_distribution_forms(const VerifyConfig& cfg);
CheckResult check_identifiability_census(const VerifyConfig& cfg);
CheckResult check_martingale(const VerifyConfig& cfg);
CheckResult check_descent_and_gradient(const VerifyConfig& cfg);
CheckResult check_boundary_formulas(const VerifyConfig& cfg);
CheckResult check_flow_census(const VerifyConfig& cfg);
CheckResult check_estimator_convergence(const VerifyConfig& cfg);
CheckResult check_decoder(const VerifyConfig& cfg);
CheckResult check_add_beta(const VerifyConfig& cfg);

// All checks above, in order.
std::vector<CheckResult> verify_suite(const VerifyConfig& cfg);

}  // namespace credence
