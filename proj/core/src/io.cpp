#include "credence/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "credence/rng.hpp"

namespace credence {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

template <typename T>
void append_vector(std::string& line, const std::vector<T>& v) {
  for (const T& x : v) {
    line += ',';
    if constexpr (std::is_same_v<T, double>)
      line += format_double(x);
    else
      line += std::to_string(x);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw IoError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream out = open_out(path);
  std::string header = "t";
  for (std::size_t i = 1; i <= tr.n; ++i) header += ",P_" + std::to_string(i);
  header += ",gamma,reset,V,dist_pi,dist_1mpi,dist_half\n";
  out << header;
  for (const TrajectoryRecord& rec : tr.records) {
    std::string line = std::to_string(rec.t);
    append_vector(line, rec.p);
    line += ',' + std::to_string(rec.gamma);
    line += rec.reset ? ",1" : ",0";
    for (const auto& opt : {rec.v, rec.dist_pi, rec.dist_1mpi, rec.dist_half}) {
      line += ',';
      if (opt) line += format_double(*opt);
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_resets_jsonl(const Trajectory& tr, const std::string& path) {
  std::ofstream out = open_out(path);
  for (const ResetEvent& ev : tr.resets) {
    ordered_json j;
    j["t"] = ev.t;
    j["y"] = ev.y;
    j["gamma_after"] = ev.gamma_after;
    out << j.dump() << '\n';
  }
  finish(out, path);
}

void write_summary_json(const ExperimentResult& result, const ExperimentConfig& cfg,
                        const std::string& path) {
  ordered_json j;
  j["config"]["n"] = cfg.n;
  j["config"]["pi"] = cfg.pi;
  j["config"]["seed"] = cfg.seed;
  j["config"]["horizon"] = cfg.horizon;
  j["config"]["schedule"] = cfg.schedule;
  j["config"]["trunc_c"] = cfg.trunc_c;
  j["config"]["trunc_gamma"] = cfg.trunc_gamma;
  j["config"]["mode"] = cfg.mode;
  j["config"]["cadence"] = cfg.effective_cadence();
  j["config"]["rng"] = kRngVersion;
  j["final_p"] = result.final_p;
  j["dist_pi"] = result.dist_pi;
  j["dist_1mpi"] = result.dist_1mpi;
  j["dist_half"] = result.dist_half;
  j["census_dist"] = result.census_dist;
  j["final_v"] = result.final_v;
  j["reset_count"] = result.reset_count;
  j["last_reset_t"] = result.last_reset_t;
  j["gamma_final"] = result.trajectory.gamma_final;
  j["truncated_early"] = result.trajectory.truncated_early;
  j["records"] = result.trajectory.records.size();
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_stream_csv(const std::vector<StreamSample>& stream, const std::string& path) {
  std::ofstream out = open_out(path);
  const std::size_t n = stream.empty() ? 0 : stream.front().r.size();
  std::string header = "t,s";
  for (std::size_t i = 1; i <= n; ++i) header += ",r_" + std::to_string(i);
  header += '\n';
  out << header;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    std::string line = std::to_string(t) + ',' + std::to_string(stream[t].s);
    append_vector(line, stream[t].r);
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_flow_csv(const FlowTrajectory& flow, const std::string& path) {
  std::ofstream out = open_out(path);
  const std::size_t n = flow.samples.empty() ? 0 : flow.samples.front().x.size();
  std::string header = "s";
  for (std::size_t i = 1; i <= n; ++i) header += ",x_" + std::to_string(i);
  header += ",V\n";
  out << header;
  for (const FlowSample& s : flow.samples) {
    std::string line = format_double(s.s);
    append_vector(line, s.x);
    line += ',' + format_double(s.v) + '\n';
    out << line;
  }
  finish(out, path);
}

void write_equilibria_json(const EquilibriumSet& set, const std::string& path) {
  ordered_json j;
  j["starts"] = set.starts;
  j["dropped"] = set.dropped;
  j["boundary_escapes"] = set.boundary_escapes;
  j["interior"] = ordered_json::array();
  for (const InteriorEquilibrium& e : set.interior) {
    ordered_json item;
    item["x"] = e.x;
    item["residual"] = e.residual;
    item["basin_count"] = e.basin_count;
    j["interior"].push_back(item);
  }
  j["boundary"] = ordered_json::array();
  for (const BoundaryEquilibrium& e : set.boundary) {
    ordered_json item;
    item["x"] = e.x;
    j["boundary"].push_back(item);
  }
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

std::string lyapunov_report_json(const LyapunovReport& report) {
  ordered_json j;
  j["x"] = report.x;
  j["v"] = report.v;
  j["gradient"] = report.gradient;
  j["descent"] = report.descent;
  j["region"] = report.region;
  return j.dump(2);
}

void write_lyapunov_report_json(const LyapunovReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << lyapunov_report_json(report) << '\n';
  finish(out, path);
}

void write_verify_csv(const std::vector<CheckResult>& results, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "n,seed,checks_run,max_violation\n";
  for (const CheckResult& res : results) {
    if (res.rows.empty()) {
      out << "0,0," << res.checks_run << ',' << format_double(res.max_violation)
          << '\n';
      continue;
    }
    for (const SweepRow& row : res.rows) {
      out << row.n << ',' << row.seed << ',' << row.checks_run << ','
          << format_double(row.max_violation) << '\n';
    }
  }
  finish(out, path);
}

}  // namespace credence
