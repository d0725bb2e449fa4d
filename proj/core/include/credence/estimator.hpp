// Online estimator of the panel's flip rates: stochastic approximation on
// the per-round soft update, optionally stabilized by expanding truncation
// boxes with reset-to-anchor (the plain variant keeps the raw recursion).
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "credence/config.hpp"
#include "credence/types.hpp"

namespace credence {

// Step sizes eta_t, t = 0,1,2,...
class StepSchedule {
 public:
  static StepSchedule harmonic(double offset = 1.0);               // 1/(t+offset)
  static StepSchedule power_law(double exponent, double scale = 1.0);  // scale*(t+1)^-p
  static StepSchedule custom(std::function<double(std::int64_t)> eta,
                             std::string description = "custom");

  // "harmonic" or "power:<p>"; throws std::invalid_argument otherwise.
  static StepSchedule parse(const std::string& text);

  double eta(std::int64_t t) const;
  const std::string& describe() const { return description_; }

 private:
  StepSchedule(std::function<double(std::int64_t)> fn, std::string description);
  std::function<double(std::int64_t)> fn_;
  std::string description_;
};

// Horizon-limited certificate for the usual step-size conditions. The two
// asymptotic conditions (sum eta diverges, sum eta^2 converges) are judged
// from partial-sum statistics at the horizon: the running sum must clear
// growth_floor, and the tail increment must satisfy (T+1)*eta_T^2 <= tail_tol.
// Exact only in the T -> infinity limit; borderline exponents near 1/2 can
// be misjudged at finite T.
struct ScheduleCheck {
  bool positive = false;
  bool non_increasing = false;
  bool diverging_sum = false;
  bool square_summable_tail = false;
  bool pass = false;
  std::int64_t first_violation = -1;  // index of the first positivity/monotonicity breach
  double sum = 0.0;
  double sum_sq = 0.0;
  double tail_stat = 0.0;  // (T+1)*eta_T^2
};

ScheduleCheck validate_schedule(const StepSchedule& s, std::int64_t horizon,
                                double growth_floor = 10.0, double tail_tol = 0.5);

// Expanding truncation boxes. K_q admits every x in [0,1]^n whose
// coordinates all lie within r_q of 1/2 except at most one (that one is
// free to be anywhere in [0,1], including pinned); r_q = 1/2 - c*(q+1)^-g.
class TruncationFamily {
 public:
  explicit TruncationFamily(double c = 0.25, double gamma = 0.5);

  double radius(std::int64_t q) const;
  bool contains(std::int64_t q, const std::vector<double>& x) const;

  // Least q with x in K_q; nullopt when no box ever admits x (two or more
  // coordinates pinned at 0/1).
  std::optional<std::int64_t> least_containing(const std::vector<double>& x) const;

  double c() const { return c_; }
  double gamma() const { return gamma_; }

 private:
  double c_;
  double gamma_;
};

// Per-round update direction: coordinate i moves toward the posterior
// probability that agent i contradicted the estimated sign,
// f_i = (1 + rho * r_i)/2 - x_i with rho = (L-1)/(L+1) = -tanh(<r,l_x>/2).
// On a singly-extreme x the pinned coordinate is held (its component is 0).
// Every component lies in [-1, 1].
std::vector<double> soft_update(const VerdictVector& r, const UnreliabilityVector& x);

// Estimated hidden sign for the round: +1 when L(r,x) < 1, else -1
// (ties at L = 1 decode to -1).
int label_estimate(const VerdictVector& r, const UnreliabilityVector& x);

struct ResetEvent {
  std::int64_t t = 0;               // time of the state after the reset
  std::vector<double> y;            // rejected candidate iterate
  std::int64_t gamma_after = 0;
};

struct EstimatorState {
  UnreliabilityVector p;
  std::int64_t t = 0;
  std::int64_t gamma = 0;           // truncation counter
  StepSchedule schedule;
  TruncationFamily family;
  std::vector<double> reset_point;  // must lie in K_0
  std::vector<ResetEvent> resets;
  bool record_corrections = false;
  std::vector<std::vector<double>> corrections;  // (P0 - y)/eta_t per reset

  static EstimatorState make(std::vector<double> p_init, StepSchedule schedule,
                             TruncationFamily family, std::vector<double> reset_point,
                             bool record_corrections = false);
};

// One plain stochastic-approximation step P <- P + eta_t * f. Rejects
// eta_t > 1 (the update must stay a subconvex move toward a point of the
// cube) and an Invalid-region state.
void step_plain(EstimatorState& s, const VerdictVector& r);

// One truncated step: the candidate y = P + eta_t * f is kept if y lies in
// K_gamma, otherwise the state resets to the anchor and gamma grows by one.
void step_truncated(EstimatorState& s, const VerdictVector& r);

// Add-beta running estimate of each agent's flip rate against known labels:
// returns q updated by round t's verdicts, q_i(t+1) = (1-nu)q_i(t) +
// nu*[r_i != s_true] with nu = 1/(t+1+2*beta). With q(0) = 1/2 this equals
// the batch form (beta + #errors)/(t + 2*beta) at every t.
std::vector<double> add_beta_update(const std::vector<double>& q, int s_true,
                                    const VerdictVector& r, std::int64_t t, double beta);

struct TrajectoryRecord {
  std::int64_t t = 0;
  std::vector<double> p;
  std::int64_t gamma = 0;
  bool reset = false;
  // Diagnostics, present when the true rates are known to the run.
  std::optional<double> v;          // Lyapunov value at p
  std::optional<double> dist_pi;
  std::optional<double> dist_1mpi;
  std::optional<double> dist_half;
};

struct Trajectory {
  std::size_t n = 0;
  std::vector<TrajectoryRecord> records;
  std::vector<ResetEvent> resets;
  std::vector<std::vector<double>> corrections;
  std::int64_t gamma_final = 0;
  bool truncated_early = false;     // stream ran out before the horizon
  std::vector<double> final_p;
};

// Verdicts for round t, or nullopt when the stream is exhausted.
using StreamFn = std::function<std::optional<VerdictVector>(std::int64_t)>;

// Drives cfg.horizon steps of the configured variant over the stream,
// sampling records every cfg.effective_cadence() steps plus at every reset
// and at the endpoints. Deterministic given the stream.
Trajectory run(const ExperimentConfig& cfg, const StreamFn& stream);

}  // namespace credence
