// Experiment configuration shared by the estimator driver and the harness.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace credence {

struct ExperimentConfig {
  std::size_t n = 0;            // panel size; 0 means "infer from pi"
  std::vector<double> pi;       // true flip rates; empty disables diagnostics
  std::uint64_t seed = 1;
  std::int64_t horizon = 100000;
  std::string schedule = "harmonic";   // "harmonic" | "power:<p>"
  double trunc_c = 0.25;
  double trunc_gamma = 0.5;
  std::vector<double> p_init;   // P(0); empty -> reset point
  std::vector<double> p0;       // reset point; empty -> default tilt
  std::string mode = "truncated";      // "truncated" | "plain"
  std::int64_t cadence = 0;     // trajectory sampling stride; 0 -> auto
  bool record_corrections = false;
  std::string out_dir;          // empty -> no files written

  // Throws std::invalid_argument on any inconsistency; fills n from pi.
  void validate();

  // ceil(horizon / 10^4), at least 1, unless cadence is set explicitly.
  std::int64_t effective_cadence() const;

  // Default reset point: coordinate i (1-based) at 1/2 - 0.05 * i/n, a
  // small asymmetric tilt off the indifference point inside the innermost
  // truncation box.
  static std::vector<double> default_reset_point(std::size_t n);

  std::vector<double> reset_point() const;
  std::vector<double> initial_point() const;
};

}  // namespace credence
