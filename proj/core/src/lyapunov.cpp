#include "credence/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "credence/meanfield.hpp"
#include "credence/model.hpp"
#include "credence/rng.hpp"

namespace credence {

namespace {

void require_interior_pi(const UnreliabilityVector& pi, const char* what) {
  if (!pi.interior())
    throw std::invalid_argument(std::string(what) + ": interior pi required");
}

// Sum with the largest magnitudes first, compensated. The KL terms span many
// orders of magnitude for skewed pi, and the naive order loses digits the
// descent checks actually notice.
double stable_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double y = t - comp;
    const double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  return sum;
}

}  // namespace

double neg_entropy(const UnreliabilityVector& pi) {
  require_interior_pi(pi, "neg_entropy");
  const std::size_t n = pi.size();
  check_enumeration_cap(n);
  std::vector<double> terms;
  terms.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    const VerdictVector r = verdict_from_mask(mask, n);
    const double g = verdict_prob(r, pi);
    terms.push_back(g * std::log(g));
  }
  return stable_sum(std::move(terms));
}

double lyapunov_value(const UnreliabilityVector& x, const UnreliabilityVector& pi) {
  require_interior_pi(pi, "lyapunov_value");
  if (x.size() != pi.size())
    throw std::invalid_argument("lyapunov_value: size mismatch");
  if (x.region() == Region::Invalid)
    throw std::domain_error("lyapunov_value: unresolvable x");
  const std::size_t n = x.size();

  if (x.region() == Region::SinglyExtreme) {
    const int i = x.extreme_index();
    double v = neg_entropy(pi) + std::log(2.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<int>(k) == i) continue;
      const double a = agreement_prob(pi[static_cast<std::size_t>(i)], pi[k]);
      const double h = agreement_prob(x[static_cast<std::size_t>(i)], x[k]);
      v += cross_entropy(a, h);
    }
    return v;
  }

  check_enumeration_cap(n);
  std::vector<double> terms;
  terms.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    const VerdictVector r = verdict_from_mask(mask, n);
    const double gp = verdict_prob(r, pi);
    const double gx = verdict_prob(r, x);
    terms.push_back(gp * (std::log(gp) - std::log(gx)));
  }
  return stable_sum(std::move(terms));
}

std::vector<double> lyapunov_gradient(const UnreliabilityVector& x,
                                      const UnreliabilityVector& pi) {
  require_interior_pi(pi, "lyapunov_gradient");
  if (x.size() != pi.size())
    throw std::invalid_argument("lyapunov_gradient: size mismatch");
  if (x.region() == Region::Invalid)
    throw std::domain_error("lyapunov_gradient: unresolvable x");
  const std::size_t n = x.size();
  const std::vector<double> f = mean_field(x, pi);
  std::vector<double> grad(n, 0.0);
  const int pinned = x.region() == Region::SinglyExtreme ? x.extreme_index() : -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == pinned) continue;
    grad[i] = -f[i] / (x[i] * (1.0 - x[i]));
  }
  if (pinned >= 0) {
    // One-sided step off the face; V is defined on one side only there.
    const std::size_t i = static_cast<std::size_t>(pinned);
    const double h = 1e-8;
    const double sign = x[i] == 0.0 ? 1.0 : -1.0;
    std::vector<double> y = x.values();
    y[i] = x[i] + sign * h;
    const double v0 = lyapunov_value(x, pi);
    const double v1 = lyapunov_value(UnreliabilityVector(y), pi);
    grad[i] = sign * (v1 - v0) / h;
  }
  return grad;
}

std::vector<double> lyapunov_gradient_fd(const UnreliabilityVector& x,
                                         const UnreliabilityVector& pi) {
  require_interior_pi(pi, "lyapunov_gradient_fd");
  if (x.size() != pi.size())
    throw std::invalid_argument("lyapunov_gradient_fd: size mismatch");
  if (x.region() == Region::Invalid)
    throw std::domain_error("lyapunov_gradient_fd: unresolvable x");
  const std::size_t n = x.size();
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double central = 1e-6;
    if (x[i] >= central && x[i] <= 1.0 - central) {
      std::vector<double> hi = x.values(), lo = x.values();
      hi[i] += central;
      lo[i] -= central;
      grad[i] = (lyapunov_value(UnreliabilityVector(hi), pi) -
                 lyapunov_value(UnreliabilityVector(lo), pi)) /
                (2.0 * central);
    } else {
      const double one_sided = 1e-8;
      const double sign = x[i] < 0.5 ? 1.0 : -1.0;
      std::vector<double> y = x.values();
      y[i] += sign * one_sided;
      grad[i] = sign *
                (lyapunov_value(UnreliabilityVector(y), pi) - lyapunov_value(x, pi)) /
                one_sided;
    }
  }
  return grad;
}

double descent_value(const UnreliabilityVector& x, const UnreliabilityVector& pi) {
  require_interior_pi(pi, "descent_value");
  if (x.size() != pi.size())
    throw std::invalid_argument("descent_value: size mismatch");
  if (x.region() == Region::Invalid)
    throw std::domain_error("descent_value: unresolvable x");
  const std::vector<double> f = mean_field(x, pi);
  const int pinned = x.region() == Region::SinglyExtreme ? x.extreme_index() : -1;
  std::vector<double> terms;
  terms.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<int>(i) == pinned) continue;
    terms.push_back(-f[i] * f[i] / (x[i] * (1.0 - x[i])));
  }
  return stable_sum(std::move(terms));
}

LevelConstants level_constants(const UnreliabilityVector& pi) {
  require_interior_pi(pi, "level_constants");
  const std::size_t n = pi.size();
  LevelConstants out;
  const double base = neg_entropy(pi) + std::log(2.0);
  out.boundary_minima.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Each free coordinate's cross entropy is minimized where it equals the
    // matching a_k, so the face minimum collapses to plain entropies.
    double m = base;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double a = agreement_prob(pi[i], pi[k]);
      m += cross_entropy(a, a);
    }
    out.boundary_minima[i] = m;
  }
  out.m_min = *std::min_element(out.boundary_minima.begin(), out.boundary_minima.end());
  for (const UnreliabilityVector& b : boundary_equilibria(pi))
    out.v_at_boundary_equilibria.push_back(lyapunov_value(b, pi));
  return out;
}

double bounds_set_v_max(const UnreliabilityVector& pi, int samples,
                        std::uint64_t seed) {
  require_interior_pi(pi, "bounds_set_v_max");
  if (samples < 1) throw std::invalid_argument("bounds_set_v_max: samples < 1");
  const std::size_t n = pi.size();
  const CounterRng rng(seed, 0);
  double best = -1.0;
  std::vector<double> x(n);
  std::uint64_t counter = 0;
  int accepted = 0;
  // Rejection sampling: the bounds set has decent volume for moderate pi, so
  // the attempt cap only guards degenerate inputs.
  const std::int64_t max_attempts = static_cast<std::int64_t>(samples) * 10000;
  for (std::int64_t attempt = 0; attempt < max_attempts && accepted < samples;
       ++attempt) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform01(counter++);
    if (!equilibrium_bounds_check(x, pi.values(), 0.0)) continue;
    ++accepted;
    best = std::max(best, lyapunov_value(UnreliabilityVector(x), pi));
  }
  if (accepted == 0)
    throw std::runtime_error("bounds_set_v_max: no accepted samples");
  return best;
}

LyapunovReport lyapunov_report(const UnreliabilityVector& x,
                               const UnreliabilityVector& pi) {
  LyapunovReport rep;
  rep.x = x.values();
  rep.v = lyapunov_value(x, pi);
  rep.gradient = lyapunov_gradient(x, pi);
  rep.descent = descent_value(x, pi);
  rep.region = region_name(x.region());
  return rep;
}

}  // namespace credence
