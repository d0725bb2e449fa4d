// Lyapunov machinery for the mean-field flow: V(x) = KL(g_pi || g_x),
// its gradient and descent rate, and the level constants that separate the
// interior rest points from the singly-extreme ones.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credence/types.hpp"

namespace credence {

// E[log g_pi(R)], the negative Shannon entropy of the verdict law. n <= 20.
double neg_entropy(const UnreliabilityVector& pi);

// V(x) = sum_r g_pi(r) log(g_pi(r)/g_x(r)). Interior x: direct enumeration
// (terms summed largest-magnitude first with compensation). Singly-extreme
// x pinned at i: the closed form
//   neg_entropy(pi) + log 2 + sum_{k != i} cross_entropy(a_k, h_k)
// with a_k = agreement_prob(pi_i, pi_k), h_k = agreement_prob(x_i, x_k).
double lyapunov_value(const UnreliabilityVector& x, const UnreliabilityVector& pi);

// Gradient of V. Interior: -f_i / (x_i (1 - x_i)) with the exact mean
// field. Singly-extreme: the same relation for the free coordinates and a
// one-sided finite difference into the cube for the pinned one.
std::vector<double> lyapunov_gradient(const UnreliabilityVector& x,
                                      const UnreliabilityVector& pi);

// Finite-difference gradient used as the independent cross-check: central
// differences (h = 1e-6), switching to one-sided steps (h = 1e-8) where a
// coordinate sits within h of the cube boundary.
std::vector<double> lyapunov_gradient_fd(const UnreliabilityVector& x,
                                         const UnreliabilityVector& pi);

// <grad V, f> = -sum_i f_i^2 / (x_i (1 - x_i)); pinned coordinates
// contribute zero. Nonpositive by construction.
double descent_value(const UnreliabilityVector& x, const UnreliabilityVector& pi);

struct LevelConstants {
  std::vector<double> boundary_minima;          // min of V over each face family
  double m_min = 0.0;                           // min over the above
  std::vector<double> v_at_boundary_equilibria; // aligned with boundary_equilibria()
};

// Exact minima of V over the singly-extreme faces. The minimum over the
// family pinned at i is attained at the corresponding boundary rest points,
// so v_at_boundary_equilibria repeats boundary_minima pairwise.
LevelConstants level_constants(const UnreliabilityVector& pi);

// Sampled max of V over the pairwise-bounds set (rejection sampling of
// `samples` accepted points). A Monte Carlo surrogate for the level bound,
// and only ever a lower bound on the true sup.
double bounds_set_v_max(const UnreliabilityVector& pi, int samples, std::uint64_t seed);

struct LyapunovReport {
  std::vector<double> x;
  double v = 0.0;
  std::vector<double> gradient;
  double descent = 0.0;
  std::string region;
};

LyapunovReport lyapunov_report(const UnreliabilityVector& x,
                               const UnreliabilityVector& pi);

}  // namespace credence
