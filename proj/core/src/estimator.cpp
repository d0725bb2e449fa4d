#include "credence/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "credence/lyapunov.hpp"
#include "credence/model.hpp"

namespace credence {

// ---- step schedules ----

StepSchedule::StepSchedule(std::function<double(std::int64_t)> fn, std::string description)
    : fn_(std::move(fn)), description_(std::move(description)) {}

StepSchedule StepSchedule::harmonic(double offset) {
  if (!(offset > 0.0))
    throw std::invalid_argument("StepSchedule: harmonic offset must be positive");
  return StepSchedule([offset](std::int64_t t) { return 1.0 / (t + offset); },
                      "harmonic");
}

StepSchedule StepSchedule::power_law(double exponent, double scale) {
  if (!(exponent > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("StepSchedule: power-law exponent and scale must be positive");
  return StepSchedule(
      [exponent, scale](std::int64_t t) {
        return scale * std::pow(static_cast<double>(t) + 1.0, -exponent);
      },
      "power:" + std::to_string(exponent));
}

StepSchedule StepSchedule::custom(std::function<double(std::int64_t)> eta,
                                  std::string description) {
  if (!eta) throw std::invalid_argument("StepSchedule: empty callable");
  return StepSchedule(std::move(eta), std::move(description));
}

StepSchedule StepSchedule::parse(const std::string& text) {
  if (text == "harmonic") return harmonic();
  if (text.rfind("power:", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(text.substr(6));
    } catch (const std::exception&) {
      throw std::invalid_argument("StepSchedule: cannot parse exponent in '" + text + "'");
    }
    return power_law(p);
  }
  throw std::invalid_argument("StepSchedule: unknown schedule '" + text +
                              "' (expected 'harmonic' or 'power:<p>')");
}

double StepSchedule::eta(std::int64_t t) const {
  if (t < 0) throw std::invalid_argument("StepSchedule: negative time");
  return fn_(t);
}

ScheduleCheck validate_schedule(const StepSchedule& s, std::int64_t horizon,
                                double growth_floor, double tail_tol) {
  if (horizon < 0) throw std::invalid_argument("validate_schedule: negative horizon");
  ScheduleCheck out;
  out.positive = true;
  out.non_increasing = true;
  double prev = 0.0;
  for (std::int64_t t = 0; t <= horizon; ++t) {
    const double e = s.eta(t);
    if (!(e > 0.0) && out.positive) {
      out.positive = false;
      out.first_violation = t;
    }
    if (t > 0 && e > prev && out.non_increasing) {
      out.non_increasing = false;
      if (out.first_violation < 0) out.first_violation = t;
    }
    out.sum += e;
    out.sum_sq += e * e;
    prev = e;
  }
  out.diverging_sum = out.sum >= growth_floor;
  const double eT = s.eta(horizon);
  out.tail_stat = static_cast<double>(horizon + 1) * eT * eT;
  out.square_summable_tail = out.tail_stat <= tail_tol;
  out.pass = out.positive && out.non_increasing && out.diverging_sum &&
             out.square_summable_tail;
  return out;
}

// ---- truncation boxes ----

TruncationFamily::TruncationFamily(double c, double gamma) : c_(c), gamma_(gamma) {
  if (!(c > 0.0) || !(c < 0.5))
    throw std::invalid_argument("TruncationFamily: c must lie in (0, 1/2)");
  if (!(gamma > 0.0))
    throw std::invalid_argument("TruncationFamily: exponent must be positive");
}

double TruncationFamily::radius(std::int64_t q) const {
  if (q < 0) throw std::invalid_argument("TruncationFamily: negative index");
  return 0.5 - c_ * std::pow(static_cast<double>(q) + 1.0, -gamma_);
}

bool TruncationFamily::contains(std::int64_t q, const std::vector<double>& x) const {
  const double r = radius(q);
  int outside = 0;
  for (double v : x) {
    if (std::isnan(v) || v < 0.0 || v > 1.0) return false;
    if (std::abs(v - 0.5) > r && ++outside > 1) return false;
  }
  return true;
}

std::optional<std::int64_t> TruncationFamily::least_containing(
    const std::vector<double>& x) const {
  // Membership exempts the single worst coordinate, so only the
  // second-largest deviation matters; invert the radius schedule for it.
  double d1 = -1.0, d2 = -1.0;
  for (double v : x) {
    if (std::isnan(v) || v < 0.0 || v > 1.0) return std::nullopt;
    const double d = std::abs(v - 0.5);
    if (d > d1) {
      d2 = d1;
      d1 = d;
    } else if (d > d2) {
      d2 = d;
    }
  }
  if (x.size() <= 1 || d2 <= radius(0)) return 0;
  if (d2 >= 0.5) return std::nullopt;
  const double q = std::pow(c_ / (0.5 - d2), 1.0 / gamma_) - 1.0;
  auto idx = static_cast<std::int64_t>(std::ceil(q));
  if (idx < 0) idx = 0;
  while (!contains(idx, x)) ++idx;  // guard rounding at the threshold
  while (idx > 0 && contains(idx - 1, x)) --idx;
  return idx;
}

// ---- per-round updates ----

std::vector<double> soft_update(const VerdictVector& r, const UnreliabilityVector& x) {
  if (x.region() == Region::Invalid)
    throw std::domain_error("soft_update: unresolvable state (two pinned coordinates)");
  validate_verdicts(r, x.size());
  const std::size_t n = x.size();
  double z;  // (L-1)/(L+1)
  if (x.region() == Region::SinglyExtreme) {
    const int i = x.extreme_index();
    const int truth = x[i] == 0.0 ? +1 : -1;
    z = r[i] == truth ? -1.0 : +1.0;
  } else {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += r[i] * std::log((1.0 - x[i]) / x[i]);
    z = -std::tanh(0.5 * s);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = 0.5 * (1.0 + z * r[i]) - x[i];
  return out;
}

int label_estimate(const VerdictVector& r, const UnreliabilityVector& x) {
  const ExtendedReal s = log_odds_inner(r, x);
  if (s.is_pos_inf()) return +1;   // L = 0
  if (s.is_neg_inf()) return -1;   // L = +inf
  return s.value() > 0.0 ? +1 : -1;  // tie (L = 1) decodes to -1
}

// ---- estimator state and steps ----

EstimatorState EstimatorState::make(std::vector<double> p_init, StepSchedule schedule,
                                    TruncationFamily family,
                                    std::vector<double> reset_point,
                                    bool record_corrections) {
  if (p_init.size() != reset_point.size())
    throw std::invalid_argument("EstimatorState: init/reset size mismatch");
  if (!family.contains(0, reset_point))
    throw std::invalid_argument("EstimatorState: reset point must lie in the innermost box");
  if (schedule.eta(0) > 1.0)
    throw std::invalid_argument("EstimatorState: schedule starts above 1");
  EstimatorState s{UnreliabilityVector(std::move(p_init)),
                   0,
                   0,
                   std::move(schedule),
                   std::move(family),
                   std::move(reset_point),
                   {},
                   record_corrections,
                   {}};
  return s;
}

namespace {

// Candidate next iterate P + eta * f. The update is a convex move toward a
// cube point whenever eta <= 1, so the clamp only absorbs 1-ulp rounding.
std::vector<double> candidate_step(EstimatorState& s, const VerdictVector& r,
                                   double* eta_out) {
  const double eta = s.schedule.eta(s.t);
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("estimator step: eta_t must lie in (0, 1], got " +
                            std::to_string(eta));
  const std::vector<double> f = soft_update(r, s.p);
  std::vector<double> y(s.p.values());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += eta * f[i];
    if (y[i] < 0.0) y[i] = 0.0;
    if (y[i] > 1.0) y[i] = 1.0;
  }
  *eta_out = eta;
  return y;
}

}  // namespace

void step_plain(EstimatorState& s, const VerdictVector& r) {
  double eta;
  std::vector<double> y = candidate_step(s, r, &eta);
  s.p = UnreliabilityVector(std::move(y));
  s.t += 1;
}

void step_truncated(EstimatorState& s, const VerdictVector& r) {
  double eta;
  std::vector<double> y = candidate_step(s, r, &eta);
  s.t += 1;
  if (s.family.contains(s.gamma, y)) {
    s.p = UnreliabilityVector(std::move(y));
    return;
  }
  s.gamma += 1;
  if (s.record_corrections) {
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      z[i] = (s.reset_point[i] - y[i]) / eta;
    s.corrections.push_back(std::move(z));
  }
  s.resets.push_back(ResetEvent{s.t, std::move(y), s.gamma});
  s.p = UnreliabilityVector(s.reset_point);
}

// ---- add-beta oracle estimate ----

std::vector<double> add_beta_update(const std::vector<double>& q, int s_true,
                                    const VerdictVector& r, std::int64_t t, double beta) {
  if (s_true != -1 && s_true != 1)
    throw std::invalid_argument("add_beta_update: label must be -1 or +1");
  if (t < 0 || beta < 0.0)
    throw std::invalid_argument("add_beta_update: t and beta must be nonnegative");
  validate_verdicts(r, q.size());
  const double nu = 1.0 / (static_cast<double>(t) + 1.0 + 2.0 * beta);
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    out[i] = (1.0 - nu) * q[i] + nu * (r[i] != s_true ? 1.0 : 0.0);
  return out;
}

// ---- experiment configuration ----

void ExperimentConfig::validate() {
  if (!pi.empty()) {
    if (n == 0) n = pi.size();
    if (n != pi.size())
      throw std::invalid_argument("config: n does not match the length of pi");
    for (double v : pi)
      if (std::isnan(v) || v <= 0.0 || v >= 1.0)
        throw std::invalid_argument("config: pi entries must lie in (0,1)");
  }
  if (n == 0) throw std::invalid_argument("config: panel size not set");
  if (horizon < 0) throw std::invalid_argument("config: negative horizon");
  if (cadence < 0) throw std::invalid_argument("config: negative cadence");
  if (mode != "truncated" && mode != "plain")
    throw std::invalid_argument("config: mode must be 'truncated' or 'plain'");
  StepSchedule::parse(schedule);           // throws on a bad schedule string
  TruncationFamily family(trunc_c, trunc_gamma);
  for (const auto* vec : {&p_init, &p0}) {
    if (vec->empty()) continue;
    if (vec->size() != n)
      throw std::invalid_argument("config: init vector length does not match n");
    for (double v : *vec)
      if (std::isnan(v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("config: init entries must lie in [0,1]");
  }
  if (!family.contains(0, reset_point()))
    throw std::invalid_argument("config: reset point outside the innermost box");
  if (mode == "truncated" && !p_init.empty() && !family.contains(0, p_init))
    throw std::invalid_argument("config: initial point outside the innermost box");
}

std::int64_t ExperimentConfig::effective_cadence() const {
  if (cadence > 0) return cadence;
  const std::int64_t c = (horizon + 9999) / 10000;
  return c > 0 ? c : 1;
}

std::vector<double> ExperimentConfig::default_reset_point(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i)
    p[i] = 0.5 - 0.05 * static_cast<double>(i + 1) / static_cast<double>(n);
  return p;
}

std::vector<double> ExperimentConfig::reset_point() const {
  return p0.empty() ? default_reset_point(n) : p0;
}

std::vector<double> ExperimentConfig::initial_point() const {
  return p_init.empty() ? reset_point() : p_init;
}

// ---- driver ----

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void add_record(Trajectory& traj, const EstimatorState& s, bool reset,
                const UnreliabilityVector* pi) {
  TrajectoryRecord rec;
  rec.t = s.t;
  rec.p = s.p.values();
  rec.gamma = s.gamma;
  rec.reset = reset;
  if (pi != nullptr && s.p.region() != Region::Invalid) {
    rec.v = lyapunov_value(s.p, *pi);
    rec.dist_pi = dist2(rec.p, pi->values());
    std::vector<double> mirror(pi->size()), half(pi->size(), 0.5);
    for (std::size_t i = 0; i < pi->size(); ++i) mirror[i] = 1.0 - (*pi)[i];
    rec.dist_1mpi = dist2(rec.p, mirror);
    rec.dist_half = dist2(rec.p, half);
  }
  traj.records.push_back(std::move(rec));
}

}  // namespace

Trajectory run(const ExperimentConfig& cfg_in, const StreamFn& stream) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  const std::int64_t horizon = cfg.horizon;
  const std::int64_t cadence = cfg.effective_cadence();
  const bool truncated_mode = cfg.mode == "truncated";

  EstimatorState state = EstimatorState::make(
      cfg.initial_point(), StepSchedule::parse(cfg.schedule),
      TruncationFamily(cfg.trunc_c, cfg.trunc_gamma), cfg.reset_point(),
      cfg.record_corrections);

  std::optional<UnreliabilityVector> pi;
  if (!cfg.pi.empty()) pi.emplace(cfg.pi);
  const UnreliabilityVector* pi_ptr = pi ? &*pi : nullptr;

  Trajectory traj;
  traj.n = cfg.n;
  add_record(traj, state, false, pi_ptr);

  for (std::int64_t t = 0; t < horizon; ++t) {
    const std::optional<VerdictVector> r = stream(t);
    if (!r) {
      traj.truncated_early = true;
      break;
    }
    const std::size_t resets_before = state.resets.size();
    if (truncated_mode)
      step_truncated(state, *r);
    else
      step_plain(state, *r);
    const bool was_reset = state.resets.size() != resets_before;
    if (was_reset || state.t % cadence == 0 || state.t == horizon)
      add_record(traj, state, was_reset, pi_ptr);
  }
  if (traj.records.back().t != state.t) add_record(traj, state, false, pi_ptr);

  traj.resets = state.resets;
  traj.corrections = state.corrections;
  traj.gamma_final = state.gamma;
  traj.final_p = state.p.values();
  return traj;
}

}  // namespace credence
