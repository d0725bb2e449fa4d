// Simulation and experiment harness: deterministic verdict streams, exact
// linear-decoder error, and end-to-end experiment runs with file outputs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credence/config.hpp"
#include "credence/estimator.hpp"
#include "credence/types.hpp"

namespace credence {

struct StreamSample {
  int s = 0;        // hidden sign
  VerdictVector r;  // panel verdicts
};

// Deterministic BSC verdict source. RNG substreams: stream 0 drives the
// hidden sign, stream i+1 the flip of agent i; sample(t) is a pure function
// of (seed, t), so any subsequence can be regenerated independently.
class StreamSampler {
 public:
  StreamSampler(UnreliabilityVector pi, std::uint64_t seed);

  StreamSample sample(std::int64_t t) const;
  std::size_t size() const { return pi_.size(); }

  // Adapter for estimator::run (never exhausts).
  StreamFn verdicts() const;

 private:
  UnreliabilityVector pi_;
  std::uint64_t seed_;
};

std::vector<StreamSample> simulate_stream(const UnreliabilityVector& pi,
                                          std::int64_t horizon, std::uint64_t seed);

// Exact error probability of the linear decoder sign(<alpha, r> - tau)
// under flip rates pi (ties decode to -1), by 2^n enumeration.
double decoder_error_exact(const std::vector<double>& pi,
                           const std::vector<double>& alpha, double tau);

// The weights that minimize the exact error: per-agent log odds. Interior
// pi only.
std::vector<double> optimal_weights(const std::vector<double>& pi);

// Minimum Euclidean distance from p to the rest-point census
// {pi, 1-pi, 1/2} plus the 2n singly-extreme points.
double census_distance(const std::vector<double>& p, const UnreliabilityVector& pi);

struct ExperimentResult {
  Trajectory trajectory;
  std::vector<double> final_p;
  double dist_pi = -1.0;        // -1 when pi unknown
  double dist_1mpi = -1.0;
  double dist_half = -1.0;
  double census_dist = -1.0;
  double final_v = -1.0;
  std::int64_t reset_count = 0;
  std::int64_t last_reset_t = -1;
  std::vector<std::string> files_written;
};

// Simulates the stream from cfg.seed, runs the estimator, and (when
// cfg.out_dir is set) writes trajectory.csv, resets.jsonl and summary.json.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace credence
