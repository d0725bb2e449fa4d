#include "credence/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace credence {

namespace {

void check01(double v, const char* what) {
  if (std::isnan(v) || v < 0.0 || v > 1.0)
    throw std::invalid_argument(std::string(what) + ": argument outside [0,1]");
}

void reject_invalid(const UnreliabilityVector& x, const char* what) {
  if (x.region() == Region::Invalid)
    throw std::domain_error(std::string(what) +
                            ": two or more pinned coordinates, sign unresolvable");
}

// Sign reported by a pinned agent when it tells the truth: +1 at x_i = 0
// (never flips), -1 at x_i = 1 (always flips, and the flipped source is -S).
int pinned_truth_sign(double xi) { return xi == 0.0 ? +1 : -1; }

}  // namespace

void check_enumeration_cap(std::size_t n) {
  if (n > kEnumerationCap)
    throw std::invalid_argument("exact enumeration capped at n = " +
                                std::to_string(kEnumerationCap) + ", got n = " +
                                std::to_string(n));
}

VerdictVector verdict_from_mask(std::uint32_t mask, std::size_t n) {
  VerdictVector r(n);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = (mask >> i) & 1u ? +1 : -1;
  return r;
}

double agreement_prob(double a, double b) {
  check01(a, "agreement_prob");
  check01(b, "agreement_prob");
  return a * b + (1.0 - a) * (1.0 - b);
}

double cross_entropy(double a, double x) {
  check01(a, "cross_entropy");
  check01(x, "cross_entropy");
  // 0 log 0 = 0 convention on both ends; a nonzero weight against an
  // impossible outcome diverges.
  double out = 0.0;
  if (a > 0.0) {
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    out -= a * std::log(x);
  }
  if (a < 1.0) {
    if (x == 1.0) return std::numeric_limits<double>::infinity();
    out -= (1.0 - a) * std::log(1.0 - x);
  }
  return out;
}

std::vector<ExtendedReal> log_odds(const UnreliabilityVector& x) {
  reject_invalid(x, "log_odds");
  std::vector<ExtendedReal> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (v == 0.0)
      out.push_back(ExtendedReal::pos_inf());
    else if (v == 1.0)
      out.push_back(ExtendedReal::neg_inf());
    else
      out.push_back(ExtendedReal::finite(std::log((1.0 - v) / v)));
  }
  return out;
}

ExtendedReal log_odds_inner(const VerdictVector& r, const UnreliabilityVector& x) {
  reject_invalid(x, "log_odds_inner");
  validate_verdicts(r, x.size());
  if (x.region() == Region::SinglyExtreme) {
    const int i = x.extreme_index();
    const int sign = r[i] * pinned_truth_sign(x[i]);
    return sign > 0 ? ExtendedReal::pos_inf() : ExtendedReal::neg_inf();
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += r[i] * std::log((1.0 - x[i]) / x[i]);
  return ExtendedReal::finite(s);
}

ExtendedReal likelihood_ratio(const VerdictVector& r, const UnreliabilityVector& x) {
  const ExtendedReal s = log_odds_inner(r, x);
  if (s.is_pos_inf()) return ExtendedReal::finite(0.0);
  if (s.is_neg_inf()) return ExtendedReal::pos_inf();
  const double v = std::exp(-s.value());
  // exp overflow means "larger than any double": collapse to the tag, which
  // every consumer treats as L >> 1.
  if (std::isinf(v)) return ExtendedReal::pos_inf();
  return ExtendedReal::finite(v);
}

double verdict_prob(const VerdictVector& r, const UnreliabilityVector& x) {
  reject_invalid(x, "verdict_prob");
  validate_verdicts(r, x.size());
  const std::size_t n = x.size();
  if (x.region() == Region::SinglyExtreme) {
    const int i = x.extreme_index();
    // The pinned agent reports the source sign exactly, so only one
    // conditional product survives; which one depends on whether r_i is the
    // truthful report. The 1/2 is the source-sign weight.
    const bool truthful = r[i] == pinned_truth_sign(x[i]);
    double p = 0.5;
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<int>(k) == i) continue;
      const bool plus = r[k] == +1;
      p *= truthful ? (plus ? 1.0 - x[k] : x[k]) : (plus ? x[k] : 1.0 - x[k]);
    }
    return p;
  }
  double pa = 1.0, pb = 1.0;  // conditionals given S = -1 and S = +1
  for (std::size_t k = 0; k < n; ++k) {
    if (r[k] == +1) {
      pa *= x[k];
      pb *= 1.0 - x[k];
    } else {
      pa *= 1.0 - x[k];
      pb *= x[k];
    }
  }
  return 0.5 * (pa + pb);
}

double verdict_prob_cosh(const VerdictVector& r, const UnreliabilityVector& x) {
  if (!x.interior())
    throw std::domain_error("verdict_prob_cosh: interior x required");
  validate_verdicts(r, x.size());
  double s = 0.0, root = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += r[i] * std::log((1.0 - x[i]) / x[i]);
    root *= std::sqrt(x[i] * (1.0 - x[i]));
  }
  return std::cosh(0.5 * s) * root;
}

bool indistinguishable(const UnreliabilityVector& x, const UnreliabilityVector& pi,
                       double tol) {
  if (x.size() != pi.size())
    throw std::invalid_argument("indistinguishable: size mismatch");
  reject_invalid(x, "indistinguishable");
  reject_invalid(pi, "indistinguishable");
  const std::size_t n = x.size();
  check_enumeration_cap(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const VerdictVector r = verdict_from_mask(mask, n);
    if (std::abs(verdict_prob(r, x) - verdict_prob(r, pi)) > tol) return false;
  }
  return true;
}

std::vector<double> pairwise_residuals(const std::vector<double>& x,
                                       const std::vector<double>& pi) {
  if (x.size() != pi.size())
    throw std::invalid_argument("pairwise_residuals: size mismatch");
  const std::size_t n = x.size();
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back((0.5 - x[i]) * (0.5 - x[j]) - (0.5 - pi[i]) * (0.5 - pi[j]));
  return out;
}

}  // namespace credence
