// Observation model for a panel of n binary-symmetric-channel agents:
// a hidden fair sign S in {-1,+1} is drawn i.i.d. each round and agent i
// reports S flipped with probability x_i. Everything here is an exact
// finite computation (2^n enumerations are capped at n <= 20).
#pragma once

#include <cstdint>
#include <vector>

#include "credence/types.hpp"

namespace credence {

inline constexpr std::size_t kEnumerationCap = 20;

// Throws std::invalid_argument when a 2^n enumeration is requested for
// n > kEnumerationCap.
void check_enumeration_cap(std::size_t n);

// Verdict vector for an enumeration index: bit i of mask set means r_i = +1.
VerdictVector verdict_from_mask(std::uint32_t mask, std::size_t n);

// Probability that two independent flips with rates a and b agree:
// a*b + (1-a)*(1-b). Arguments must lie in [0,1].
double agreement_prob(double a, double b);

// Cross entropy of Bernoulli(a) against Bernoulli(x):
// -a log x - (1-a) log(1-x), with the 0 log 0 = 0 convention. Returns
// +infinity when x is extreme and the paired coefficient is nonzero.
double cross_entropy(double a, double x);

// Coordinate-wise log odds l_i = log((1-x_i)/x_i); exact +inf at x_i = 0
// and -inf at x_i = 1. Rejects Invalid-region input.
std::vector<ExtendedReal> log_odds(const UnreliabilityVector& x);

// <r, l_x>. Finite on the interior; on a singly-extreme x the pinned
// coordinate dominates and the result is an exact signed infinity.
ExtendedReal log_odds_inner(const VerdictVector& r, const UnreliabilityVector& x);

// Likelihood ratio L(r,x) = prod_i (x_i/(1-x_i))^{r_i} of the two sign
// hypotheses, evaluated through the log-odds sum (never as a raw product).
// Singly-extreme x gives exact 0 or +inf. Interior values beyond double
// range collapse to the +inf tag / 0.0; consumers that only need the
// comparison against 1 are unaffected.
ExtendedReal likelihood_ratio(const VerdictVector& r, const UnreliabilityVector& x);

// Probability g_x(r) of observing verdicts r under flip rates x, the hidden
// sign marginalized out. Interior: half-sum of the two conditional products.
// Singly-extreme: the reduced product over the free coordinates, still with
// the 1/2 sign weight (required for normalization and for continuity of g
// along x_i -> {0,1}).
double verdict_prob(const VerdictVector& r, const UnreliabilityVector& x);

// Same density through cosh(<r,l_x>/2) * prod_i sqrt(x_i(1-x_i)).
// Interior x only; used to cross-check verdict_prob.
double verdict_prob_cosh(const VerdictVector& r, const UnreliabilityVector& x);

// True when max_r |g_x(r) - g_pi(r)| <= tol over all 2^n verdicts.
bool indistinguishable(const UnreliabilityVector& x, const UnreliabilityVector& pi,
                       double tol = 1e-9);

// Residuals (1/2 - x_i)(1/2 - x_j) - (1/2 - pi_i)(1/2 - pi_j) for all pairs
// i < j in row-major order; zero exactly on the indistinguishable set.
std::vector<double> pairwise_residuals(const std::vector<double>& x,
                                       const std::vector<double>& pi);

}  // namespace credence
