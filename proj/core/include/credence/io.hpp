// File output: CSV and JSON serializers for trajectories, flows, equilibria
// and verification summaries. Floating-point values are written in shortest
// round-trip form so identical runs produce byte-identical files.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "credence/estimator.hpp"
#include "credence/harness.hpp"
#include "credence/lyapunov.hpp"
#include "credence/meanfield.hpp"
#include "credence/verify.hpp"

namespace credence {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Header t,P_1..P_n,gamma,reset,V,dist_pi,dist_1mpi,dist_half; diagnostics
// not computed are left as empty fields.
void write_trajectory_csv(const Trajectory& tr, const std::string& path);

// One {"t":..,"y":[..],"gamma_after":..} object per line.
void write_resets_jsonl(const Trajectory& tr, const std::string& path);

void write_summary_json(const ExperimentResult& result, const ExperimentConfig& cfg,
                        const std::string& path);

// Header t,s,r_1..r_n.
void write_stream_csv(const std::vector<StreamSample>& stream, const std::string& path);

// Header s,x_1..x_n,V.
void write_flow_csv(const FlowTrajectory& flow, const std::string& path);

void write_equilibria_json(const EquilibriumSet& set, const std::string& path);

std::string lyapunov_report_json(const LyapunovReport& report);
void write_lyapunov_report_json(const LyapunovReport& report, const std::string& path);

// Header n,seed,checks_run,max_violation; one row per sweep entry of each
// check. Checks without a per-n breakdown contribute one aggregate row with
// n = 0 and seed = 0.
void write_verify_csv(const std::vector<CheckResult>& results, const std::string& path);

}  // namespace credence
