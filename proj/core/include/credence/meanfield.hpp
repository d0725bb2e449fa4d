// Mean-field analysis of the estimator: the expected update direction
// f(x) = E[soft_update(R, x)] under the true panel law, its rest points,
// and the associated ODE flow. All expectations are exact 2^n enumerations.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credence/types.hpp"

namespace credence {

// f(x) under verdicts distributed per interior rates pi. Interior x: exact
// enumeration. Singly-extreme x: closed form, f_i = 0 at the pinned
// coordinate and f_j = agreement_prob(pi_i, agreement_prob(x_i, pi_j)) - x_j
// elsewhere.
std::vector<double> mean_field(const UnreliabilityVector& x,
                               const UnreliabilityVector& pi);

// The 2n singly-extreme rest points: for each agent i pinned to 0 or 1, the
// free coordinates solve the closed form above exactly.
std::vector<UnreliabilityVector> boundary_equilibria(const UnreliabilityVector& pi);

struct FlowSample {
  double s = 0.0;
  std::vector<double> x;
  double v = 0.0;  // Lyapunov value at x
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  double step = 0.0;
  bool aborted = false;
  std::string abort_reason;
  std::int64_t clamp_events = 0;
};

// Fixed-step RK4 integration of dx/ds = f(x) for `duration` time units.
// Iterates (and stage points) are clamped to [1e-12, 1 - 1e-12]; when x0 is
// singly-extreme the pinned coordinate is held exactly. The Lyapunov value
// is monitored every step and the flow aborts with a diagnostic if it ever
// increases by more than 1e-8 * (1 + |V|). Samples are recorded every
// record_every steps plus the endpoints.
FlowTrajectory ode_flow(const UnreliabilityVector& x0, const UnreliabilityVector& pi,
                        double duration, double step, std::int64_t record_every = 1);

struct InteriorEquilibrium {
  std::vector<double> x;
  double residual = 0.0;   // ||f||_inf at x
  int basin_count = 0;     // starts whose damped path settled here
};

struct BoundaryEquilibrium {
  std::vector<double> x;
};

struct EquilibriumSet {
  std::vector<InteriorEquilibrium> interior;
  std::vector<BoundaryEquilibrium> boundary;
  int starts = 0;
  int dropped = 0;            // starts with no converged polish
  int boundary_escapes = 0;   // paths that left the interior margin
};

// Census of interior rest points by damped fixed-point iteration
// x <- x + 0.5 f(x) from `multistart` uniform interior starts, each polished
// by Newton on f (finite-difference Jacobian). Points are deduplicated at
// 1e-6 and reported with their residual; boundary points come from the
// closed form. n is capped at 8.
EquilibriumSet find_equilibria(const UnreliabilityVector& pi, int multistart,
                               std::uint64_t seed);

// Pairwise bounds every rest point must satisfy:
// |x_i - x_j| <= agreement_prob(pi_i, 1 - pi_j) <= x_i + x_j for all i < j.
// `slack` absorbs rounding; the bounds are tight at the boundary points.
bool equilibrium_bounds_check(const std::vector<double>& x,
                              const std::vector<double>& pi, double slack = 1e-12);

}  // namespace credence
