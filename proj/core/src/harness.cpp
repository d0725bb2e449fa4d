#include "credence/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "credence/io.hpp"
#include "credence/lyapunov.hpp"
#include "credence/meanfield.hpp"
#include "credence/model.hpp"
#include "credence/rng.hpp"

namespace credence {

StreamSampler::StreamSampler(UnreliabilityVector pi, std::uint64_t seed)
    : pi_(std::move(pi)), seed_(seed) {
  if (!pi_.interior())
    throw std::invalid_argument("StreamSampler: interior pi required");
}

StreamSample StreamSampler::sample(std::int64_t t) const {
  if (t < 0) throw std::invalid_argument("StreamSampler: negative t");
  const auto counter = static_cast<std::uint64_t>(t);
  StreamSample out;
  out.s = CounterRng(seed_, 0).uniform01(counter) < 0.5 ? 1 : -1;
  out.r.resize(pi_.size());
  for (std::size_t i = 0; i < pi_.size(); ++i) {
    const double u = CounterRng(seed_, i + 1).uniform01(counter);
    out.r[i] = u < pi_[i] ? -out.s : out.s;
  }
  return out;
}

StreamFn StreamSampler::verdicts() const {
  StreamSampler copy = *this;
  return [copy](std::int64_t t) -> std::optional<VerdictVector> {
    return copy.sample(t).r;
  };
}

std::vector<StreamSample> simulate_stream(const UnreliabilityVector& pi,
                                          std::int64_t horizon, std::uint64_t seed) {
  if (horizon < 0) throw std::invalid_argument("simulate_stream: negative horizon");
  const StreamSampler sampler(pi, seed);
  std::vector<StreamSample> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) out.push_back(sampler.sample(t));
  return out;
}

double decoder_error_exact(const std::vector<double>& pi,
                           const std::vector<double>& alpha, double tau) {
  const std::size_t n = pi.size();
  if (alpha.size() != n)
    throw std::invalid_argument("decoder_error_exact: size mismatch");
  if (n == 0) throw std::invalid_argument("decoder_error_exact: empty pi");
  check_enumeration_cap(n);
  for (double p : pi)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("decoder_error_exact: pi out of range");

  double err = 0.0;
  for (int s : {1, -1}) {
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
      double prob = 1.0;
      double stat = -tau;
      for (std::size_t i = 0; i < n; ++i) {
        const int r = ((mask >> i) & 1u) ? 1 : -1;
        prob *= r == s ? 1.0 - pi[i] : pi[i];
        stat += alpha[i] * r;
      }
      const int decoded = stat > 0.0 ? 1 : -1;
      if (decoded != s) err += 0.5 * prob;
    }
  }
  return err;
}

std::vector<double> optimal_weights(const std::vector<double>& pi) {
  std::vector<double> w(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (!(pi[i] > 0.0 && pi[i] < 1.0))
      throw std::invalid_argument("optimal_weights: interior pi required");
    w[i] = std::log((1.0 - pi[i]) / pi[i]);
  }
  return w;
}

namespace {

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

double census_distance(const std::vector<double>& p, const UnreliabilityVector& pi) {
  if (p.size() != pi.size())
    throw std::invalid_argument("census_distance: size mismatch");
  const std::size_t n = p.size();
  std::vector<std::vector<double>> census;
  census.push_back(pi.values());
  std::vector<double> mirror(n), half(n, 0.5);
  for (std::size_t i = 0; i < n; ++i) mirror[i] = 1.0 - pi[i];
  census.push_back(std::move(mirror));
  census.push_back(std::move(half));
  for (const UnreliabilityVector& b : boundary_equilibria(pi))
    census.push_back(b.values());
  double best = l2_distance(p, census.front());
  for (std::size_t k = 1; k < census.size(); ++k)
    best = std::min(best, l2_distance(p, census[k]));
  return best;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  if (cfg.pi.empty())
    throw std::invalid_argument("run_experiment: pi required to simulate a stream");

  const UnreliabilityVector pi{std::vector<double>(cfg.pi)};
  const StreamSampler sampler(pi, cfg.seed);

  ExperimentResult result;
  result.trajectory = run(cfg, sampler.verdicts());
  result.final_p = result.trajectory.final_p;
  result.reset_count = static_cast<std::int64_t>(result.trajectory.resets.size());
  if (!result.trajectory.resets.empty())
    result.last_reset_t = result.trajectory.resets.back().t;

  const std::size_t n = result.final_p.size();
  std::vector<double> mirror(n), half(n, 0.5);
  for (std::size_t i = 0; i < n; ++i) mirror[i] = 1.0 - cfg.pi[i];
  result.dist_pi = l2_distance(result.final_p, cfg.pi);
  result.dist_1mpi = l2_distance(result.final_p, mirror);
  result.dist_half = l2_distance(result.final_p, half);
  result.census_dist = census_distance(result.final_p, pi);
  const UnreliabilityVector p_final{std::vector<double>(result.final_p)};
  if (p_final.region() != Region::Invalid)
    result.final_v = lyapunov_value(p_final, pi);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    const std::string traj = (dir / "trajectory.csv").string();
    const std::string resets = (dir / "resets.jsonl").string();
    const std::string summary = (dir / "summary.json").string();
    write_trajectory_csv(result.trajectory, traj);
    write_resets_jsonl(result.trajectory, resets);
    write_summary_json(result, cfg, summary);
    result.files_written = {traj, resets, summary};
  }
  return result;
}

}  // namespace credence
