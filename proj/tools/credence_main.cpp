#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "credence/config.hpp"
#include "credence/estimator.hpp"
#include "credence/harness.hpp"
#include "credence/io.hpp"
#include "credence/lyapunov.hpp"
#include "credence/meanfield.hpp"
#include "credence/rng.hpp"
#include "credence/types.hpp"
#include "credence/verify.hpp"

namespace {

using credence::ExperimentConfig;
using credence::UnreliabilityVector;
using ordered_json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kCheckFailure = 3;
constexpr int kIoError = 4;

// Flat key=value config files. CLI11 2.4 never runs its config-file pass on
// subcommands (only the root app processes set_config), so the file is
// expanded into ordinary argv tokens before parsing. A key is skipped when
// its flag already appears on the command line, so explicit flags win.
std::vector<std::pair<std::string, std::string>> read_flat_config(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  auto trim = [](const std::string& s) {
    const char* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  };
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key=value, got: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key in line: " + line);
    if (val.size() >= 2 && ((val.front() == '"' && val.back() == '"') ||
                            (val.front() == '\'' && val.back() == '\'')))
      val = val.substr(1, val.size() - 2);
    kv.emplace_back(std::move(key), std::move(val));
  }
  return kv;
}

std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::invalid_argument("config: --config needs a file path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  for (const auto& [key, val] : read_flat_config(path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const std::string& a : args)
      given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (!given) args.push_back(flag + "=" + val);
  }
  return args;
}

void add_config_option(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path,
                  "flat key=value file mirroring the flags; explicit flags win");
}

void add_common_config(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--n", cfg.n, "panel size (checked against --pi)");
  cmd->add_option("--pi", cfg.pi, "true flip rates, comma separated")
      ->delimiter(',')
      ->required();
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--horizon", cfg.horizon, "number of rounds");
}

std::string emit(const ordered_json& j) { return j.dump(2); }

int run_simulate(const ExperimentConfig& cfg_in, const std::string& out_dir) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  const UnreliabilityVector pi{std::vector<double>(cfg.pi)};
  const auto stream = credence::simulate_stream(pi, cfg.horizon, cfg.seed);
  std::filesystem::create_directories(out_dir);
  const std::string path =
      (std::filesystem::path(out_dir) / "stream.csv").string();
  credence::write_stream_csv(stream, path);
  std::cout << "wrote " << path << " (" << stream.size() << " rounds)\n";
  return kOk;
}

int run_estimate(const ExperimentConfig& cfg) {
  const credence::ExperimentResult result = credence::run_experiment(cfg);
  ordered_json j;
  j["final_p"] = result.final_p;
  j["dist_pi"] = result.dist_pi;
  j["dist_1mpi"] = result.dist_1mpi;
  j["dist_half"] = result.dist_half;
  j["census_dist"] = result.census_dist;
  j["final_v"] = result.final_v;
  j["reset_count"] = result.reset_count;
  j["last_reset_t"] = result.last_reset_t;
  j["files"] = result.files_written;
  std::cout << emit(j) << '\n';
  return kOk;
}

int run_odeflow(const std::vector<double>& pi_in, const std::vector<double>& x0_in,
                double duration, double step, std::int64_t record_every,
                const std::string& out_dir) {
  const UnreliabilityVector pi{std::vector<double>(pi_in)};
  const UnreliabilityVector x0{std::vector<double>(x0_in)};
  const credence::FlowTrajectory flow =
      credence::ode_flow(x0, pi, duration, step, record_every);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string path =
        (std::filesystem::path(out_dir) / "flow.csv").string();
    credence::write_flow_csv(flow, path);
    std::cout << "wrote " << path << " (" << flow.samples.size() << " samples)\n";
  }
  const UnreliabilityVector endpoint{std::vector<double>(flow.samples.back().x)};
  const credence::LyapunovReport report = credence::lyapunov_report(endpoint, pi);
  ordered_json j = ordered_json::parse(credence::lyapunov_report_json(report));
  j["aborted"] = flow.aborted;
  if (flow.aborted) j["abort_reason"] = flow.abort_reason;
  j["clamp_events"] = flow.clamp_events;
  std::cout << emit(j) << '\n';
  return flow.aborted ? kCheckFailure : kOk;
}

int run_equilibria(const std::vector<double>& pi_in, int multistart,
                   std::uint64_t seed, const std::string& out_dir) {
  const UnreliabilityVector pi{std::vector<double>(pi_in)};
  const credence::EquilibriumSet set =
      credence::find_equilibria(pi, multistart, seed);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string path =
        (std::filesystem::path(out_dir) / "equilibria.json").string();
    credence::write_equilibria_json(set, path);
    std::cout << "wrote " << path << '\n';
  }
  ordered_json j;
  j["interior_count"] = set.interior.size();
  j["boundary_count"] = set.boundary.size();
  j["starts"] = set.starts;
  j["dropped"] = set.dropped;
  j["boundary_escapes"] = set.boundary_escapes;
  for (const credence::InteriorEquilibrium& e : set.interior) {
    ordered_json item;
    item["x"] = e.x;
    item["residual"] = e.residual;
    item["basin_count"] = e.basin_count;
    j["interior"].push_back(item);
  }
  std::cout << emit(j) << '\n';
  return kOk;
}

int run_verify(std::uint64_t seed, double corrupt_g, const std::string& out_dir) {
  credence::VerifyConfig vc;
  vc.seed = seed;
  vc.corrupt_g = corrupt_g;
  const std::vector<credence::CheckResult> results = credence::verify_suite(vc);
  bool all_pass = true;
  for (const credence::CheckResult& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " (checks=" << r.checks_run
              << ", max_violation=" << credence::format_double(r.max_violation)
              << ", " << credence::format_double(r.seconds) << "s)";
    if (!r.pass) std::cout << ": " << r.detail;
    std::cout << '\n';
    all_pass = all_pass && r.pass;
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string path =
        (std::filesystem::path(out_dir) / "verify_summary.csv").string();
    credence::write_verify_csv(results, path);
    std::cout << "wrote " << path << '\n';
  }
  return all_pass ? kOk : kCheckFailure;
}

int run_decode(const std::vector<double>& pi, std::vector<double> alpha, double tau,
               std::int64_t mc_rounds, std::uint64_t seed) {
  if (alpha.empty()) alpha = credence::optimal_weights(pi);
  if (alpha.size() != pi.size())
    throw std::invalid_argument("decode: alpha size must match pi");
  const double exact = credence::decoder_error_exact(pi, alpha, tau);
  ordered_json j;
  j["pi"] = pi;
  j["alpha"] = alpha;
  j["tau"] = tau;
  j["exact_error"] = exact;
  if (mc_rounds > 0) {
    const credence::StreamSampler sampler(
        UnreliabilityVector{std::vector<double>(pi)}, seed);
    std::int64_t errors = 0;
    for (std::int64_t t = 0; t < mc_rounds; ++t) {
      const credence::StreamSample s = sampler.sample(t);
      double stat = -tau;
      for (std::size_t i = 0; i < pi.size(); ++i) stat += alpha[i] * s.r[i];
      if ((stat > 0.0 ? 1 : -1) != s.s) ++errors;
    }
    j["mc_rounds"] = mc_rounds;
    j["mc_error"] = static_cast<double>(errors) / static_cast<double>(mc_rounds);
  }
  std::cout << emit(j) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"credence: estimation and analysis of panel unreliability"};
  app.require_subcommand(1);
  std::string config_path;

  ExperimentConfig sim_cfg;
  std::string sim_out;
  CLI::App* sim = app.add_subcommand("simulate", "dump a verdict stream to CSV");
  add_config_option(sim, config_path);
  add_common_config(sim, sim_cfg);
  sim->add_option("--out", sim_out, "output directory")->required();

  ExperimentConfig est_cfg;
  CLI::App* est = app.add_subcommand("estimate", "run the online estimator");
  add_config_option(est, config_path);
  add_common_config(est, est_cfg);
  est->add_option("--schedule", est_cfg.schedule, "harmonic | power:<p>");
  est->add_option("--trunc-c", est_cfg.trunc_c, "truncation radius scale");
  est->add_option("--trunc-gamma", est_cfg.trunc_gamma, "truncation radius exponent");
  est->add_option("--p-init", est_cfg.p_init, "initial iterate")->delimiter(',');
  est->add_option("--p0", est_cfg.p0, "reset anchor")->delimiter(',');
  est->add_option("--mode", est_cfg.mode, "truncated | plain");
  est->add_option("--cadence", est_cfg.cadence, "record stride (0 = auto)");
  est->add_flag("--record-corrections", est_cfg.record_corrections,
                "store (P0 - y)/eta at each reset");
  est->add_option("--out", est_cfg.out_dir, "output directory");

  std::vector<double> flow_pi, flow_x0;
  double flow_duration = 100.0, flow_step = 0.01;
  std::int64_t flow_record = 100;
  std::string flow_out;
  CLI::App* flow = app.add_subcommand("odeflow", "integrate the mean-field flow");
  add_config_option(flow, config_path);
  flow->add_option("--pi", flow_pi, "true flip rates")->delimiter(',')->required();
  flow->add_option("--x0", flow_x0, "start point")->delimiter(',')->required();
  flow->add_option("--duration", flow_duration, "flow time");
  flow->add_option("--step", flow_step, "RK4 step");
  flow->add_option("--record-every", flow_record, "sample stride in steps");
  flow->add_option("--out", flow_out, "output directory");

  std::vector<double> eq_pi;
  int eq_multistart = 200;
  std::uint64_t eq_seed = 1;
  std::string eq_out;
  CLI::App* eq = app.add_subcommand("equilibria", "census of mean-field rest points");
  add_config_option(eq, config_path);
  eq->add_option("--pi", eq_pi, "true flip rates")->delimiter(',')->required();
  eq->add_option("--multistart", eq_multistart, "number of random starts");
  eq->add_option("--seed", eq_seed, "RNG seed");
  eq->add_option("--out", eq_out, "output directory");

  std::uint64_t ver_seed = 1;
  double ver_corrupt = 0.0;
  std::string ver_out;
  CLI::App* ver = app.add_subcommand("verify", "run the certificate suite");
  add_config_option(ver, config_path);
  ver->add_option("--seed", ver_seed, "RNG seed");
  ver->add_option("--corrupt-g", ver_corrupt,
                  "debug hook: perturb the density inside the normalization check");
  ver->add_option("--out", ver_out, "output directory for verify_summary.csv");

  std::vector<double> dec_pi, dec_alpha;
  double dec_tau = 0.0;
  std::int64_t dec_mc = 0;
  std::uint64_t dec_seed = 1;
  CLI::App* dec = app.add_subcommand("decode", "exact linear-decoder error");
  add_config_option(dec, config_path);
  dec->add_option("--pi", dec_pi, "true flip rates")->delimiter(',')->required();
  dec->add_option("--alpha", dec_alpha, "decoder weights (default: log odds)")
      ->delimiter(',');
  dec->add_option("--tau", dec_tau, "decoder threshold");
  dec->add_option("--mc", dec_mc, "Monte Carlo rounds (0 = skip)");
  dec->add_option("--seed", dec_seed, "RNG seed for Monte Carlo");

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (app.got_subcommand(sim)) return run_simulate(sim_cfg, sim_out);
    if (app.got_subcommand(est)) return run_estimate(est_cfg);
    if (app.got_subcommand(flow))
      return run_odeflow(flow_pi, flow_x0, flow_duration, flow_step, flow_record,
                         flow_out);
    if (app.got_subcommand(eq))
      return run_equilibria(eq_pi, eq_multistart, eq_seed, eq_out);
    if (app.got_subcommand(ver)) return run_verify(ver_seed, ver_corrupt, ver_out);
    if (app.got_subcommand(dec))
      return run_decode(dec_pi, dec_alpha, dec_tau, dec_mc, dec_seed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  } catch (const credence::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kConfigError;
}
