#include "credence/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "credence/lyapunov.hpp"
#include "credence/model.hpp"
#include "credence/rng.hpp"

namespace credence {

namespace {

constexpr double kClamp = 1e-12;         // integration band off the faces
constexpr double kInteriorMargin = 1e-3;  // census classification threshold
constexpr std::size_t kEquilibriaCap = 8;

void require_interior_pi(const UnreliabilityVector& pi, const char* what) {
  if (!pi.interior())
    throw std::invalid_argument(std::string(what) + ": interior pi required");
}

// g_pi(r) for every verdict mask (bit i set <=> r_i = +1).
std::vector<double> density_table(const UnreliabilityVector& pi) {
  const std::size_t n = pi.size();
  check_enumeration_cap(n);
  std::vector<double> g(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < g.size(); ++mask) {
    double pa = 1.0, pb = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) {
        pa *= pi[i];
        pb *= 1.0 - pi[i];
      } else {
        pa *= 1.0 - pi[i];
        pb *= pi[i];
      }
    }
    g[mask] = 0.5 * (pa + pb);
  }
  return g;
}

// Exact expected update over an interior x: every coordinate strictly inside
// (0,1). out is overwritten.
void mean_field_interior(const std::vector<double>& x, const std::vector<double>& gpi,
                         std::vector<double>& out) {
  const std::size_t n = x.size();
  std::vector<double> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = std::log((1.0 - x[i]) / x[i]);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::uint32_t mask = 0; mask < gpi.size(); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += ((mask >> i) & 1u) ? l[i] : -l[i];
    const double z = -std::tanh(0.5 * s);
    const double w = gpi[mask];
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ((mask >> i) & 1u) ? 1.0 : -1.0;
      out[i] += w * (0.5 * (1.0 + z * r) - x[i]);
    }
  }
}

// Closed form on a singly-extreme x (pinned coordinate held at f = 0).
void mean_field_boundary(const std::vector<double>& x, int pinned,
                         const std::vector<double>& pi, std::vector<double>& out) {
  const double xi = x[static_cast<std::size_t>(pinned)];
  const double pii = pi[static_cast<std::size_t>(pinned)];
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (static_cast<int>(j) == pinned) {
      out[j] = 0.0;
      continue;
    }
    out[j] = agreement_prob(pii, agreement_prob(xi, pi[j])) - x[j];
  }
}

// Dense LU solve with partial pivoting; false on a (near-)singular matrix.
bool solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& out) {
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_abs = std::abs(a[piv[col] * n + col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double v = std::abs(a[piv[row] * n + col]);
      if (v > best_abs) {
        best_abs = v;
        best = row;
      }
    }
    if (best_abs < 1e-14) return false;
    std::swap(piv[col], piv[best]);
    const double pivot = a[piv[col] * n + col];
    for (std::size_t row = col + 1; row < n; ++row) {
      const double m = a[piv[row] * n + col] / pivot;
      if (m == 0.0) continue;
      a[piv[row] * n + col] = 0.0;
      for (std::size_t k = col + 1; k < n; ++k)
        a[piv[row] * n + k] -= m * a[piv[col] * n + k];
      b[piv[row]] -= m * b[piv[col]];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[piv[i]];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[piv[i] * n + k] * out[k];
    out[i] = s / a[piv[i] * n + i];
  }
  return true;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> mean_field(const UnreliabilityVector& x,
                               const UnreliabilityVector& pi) {
  require_interior_pi(pi, "mean_field");
  if (x.size() != pi.size())
    throw std::invalid_argument("mean_field: size mismatch");
  if (x.region() == Region::Invalid)
    throw std::domain_error("mean_field: unresolvable x (two pinned coordinates)");
  std::vector<double> out(x.size());
  if (x.region() == Region::SinglyExtreme) {
    mean_field_boundary(x.values(), x.extreme_index(), pi.values(), out);
  } else {
    const std::vector<double> gpi = density_table(pi);
    mean_field_interior(x.values(), gpi, out);
  }
  return out;
}

std::vector<UnreliabilityVector> boundary_equilibria(const UnreliabilityVector& pi) {
  require_interior_pi(pi, "boundary_equilibria");
  const std::size_t n = pi.size();
  std::vector<UnreliabilityVector> out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double xi : {0.0, 1.0}) {
      std::vector<double> x(n);
      x[i] = xi;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        x[j] = agreement_prob(pi[i], agreement_prob(xi, pi[j]));
      }
      out.emplace_back(std::move(x));
    }
  }
  return out;
}

FlowTrajectory ode_flow(const UnreliabilityVector& x0, const UnreliabilityVector& pi,
                        double duration, double step, std::int64_t record_every) {
  require_interior_pi(pi, "ode_flow");
  if (x0.size() != pi.size()) throw std::invalid_argument("ode_flow: size mismatch");
  if (x0.region() == Region::Invalid)
    throw std::domain_error("ode_flow: unresolvable start");
  if (!(duration >= 0.0) || !(step > 0.0) || record_every < 1)
    throw std::invalid_argument("ode_flow: bad duration/step/record_every");

  const std::size_t n = x0.size();
  const int pinned = x0.region() == Region::SinglyExtreme ? x0.extreme_index() : -1;
  const std::vector<double> gpi = density_table(pi);

  FlowTrajectory flow;
  flow.step = step;

  auto eval = [&](const std::vector<double>& x, std::vector<double>& out) {
    if (pinned >= 0)
      mean_field_boundary(x, pinned, pi.values(), out);
    else
      mean_field_interior(x, gpi, out);
  };
  auto clamp = [&](std::vector<double>& x, bool count) {
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i) == pinned) continue;
      const double c = std::min(std::max(x[i], kClamp), 1.0 - kClamp);
      if (c != x[i]) {
        x[i] = c;
        if (count) ++flow.clamp_events;
      }
    }
  };
  auto value = [&](const std::vector<double>& x) {
    return lyapunov_value(UnreliabilityVector(x), pi);
  };

  std::vector<double> x = x0.values();
  clamp(x, false);
  double v = value(x);
  flow.samples.push_back(FlowSample{0.0, x, v});

  const auto steps = static_cast<std::int64_t>(std::ceil(duration / step));
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  for (std::int64_t k = 1; k <= steps; ++k) {
    eval(x, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * step * k1[i];
    clamp(stage, false);
    eval(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * step * k2[i];
    clamp(stage, false);
    eval(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + step * k3[i];
    clamp(stage, false);
    eval(stage, k4);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    clamp(x, true);

    const double v_next = value(x);
    const bool record = k % record_every == 0 || k == steps;
    if (v_next > v + 1e-8 * (1.0 + std::abs(v))) {
      flow.aborted = true;
      flow.abort_reason = "Lyapunov value increased at s = " +
                          std::to_string(static_cast<double>(k) * step);
      flow.samples.push_back(FlowSample{static_cast<double>(k) * step, x, v_next});
      return flow;
    }
    v = v_next;
    if (record)
      flow.samples.push_back(FlowSample{static_cast<double>(k) * step, x, v});
  }
  return flow;
}

namespace {

struct PolishResult {
  std::vector<double> x;
  double residual = 0.0;
};

// Newton on f with a finite-difference Jacobian and monotone backtracking.
std::optional<PolishResult> newton_polish(std::vector<double> x,
                                          const std::vector<double>& gpi,
                                          std::size_t n) {
  std::vector<double> f(n), f_trial(n), jac(n * n), col_hi(n), col_lo(n), d(n), trial(n);
  mean_field_interior(x, gpi, f);
  double res = inf_norm(f);
  for (int iter = 0; iter < 60; ++iter) {
    if (res <= 1e-13) break;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = std::min({1e-6, 0.5 * x[j], 0.5 * (1.0 - x[j])});
      if (!(h > 0.0)) return std::nullopt;
      std::vector<double> xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      mean_field_interior(xp, gpi, col_hi);
      mean_field_interior(xm, gpi, col_lo);
      for (std::size_t i = 0; i < n; ++i)
        jac[i * n + j] = (col_hi[i] - col_lo[i]) / (2.0 * h);
    }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -f[i];
    if (!solve_linear(jac, rhs, n, d)) return std::nullopt;
    bool accepted = false;
    double lambda = 1.0;
    for (int half = 0; half < 6 && !accepted; ++half, lambda *= 0.5) {
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = x[i] + lambda * d[i];
        if (!(trial[i] > kClamp) || !(trial[i] < 1.0 - kClamp)) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      mean_field_interior(trial, gpi, f_trial);
      const double res_trial = inf_norm(f_trial);
      if (res_trial < res) {
        x = trial;
        f = f_trial;
        res = res_trial;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  if (res > 1e-10) return std::nullopt;
  return PolishResult{std::move(x), res};
}

}  // namespace

EquilibriumSet find_equilibria(const UnreliabilityVector& pi, int multistart,
                               std::uint64_t seed) {
  require_interior_pi(pi, "find_equilibria");
  const std::size_t n = pi.size();
  if (n > kEquilibriaCap)
    throw std::invalid_argument("find_equilibria: capped at n = " +
                                std::to_string(kEquilibriaCap));
  if (multistart < 1) throw std::invalid_argument("find_equilibria: multistart < 1");

  const std::vector<double> gpi = density_table(pi);
  EquilibriumSet set;
  set.starts = multistart;

  auto interior_point = [&](const std::vector<double>& x) {
    for (double v : x)
      if (v < kInteriorMargin || v > 1.0 - kInteriorMargin) return false;
    return true;
  };
  // Returns the census slot the point lands in, deduplicating at 1e-6.
  auto admit = [&](const PolishResult& p) -> int {
    for (std::size_t k = 0; k < set.interior.size(); ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        d = std::max(d, std::abs(p.x[i] - set.interior[k].x[i]));
      if (d <= 1e-6) {
        if (p.residual < set.interior[k].residual) {
          set.interior[k].x = p.x;
          set.interior[k].residual = p.residual;
        }
        return static_cast<int>(k);
      }
    }
    set.interior.push_back(InteriorEquilibrium{p.x, p.residual, 0});
    return static_cast<int>(set.interior.size()) - 1;
  };

  std::vector<double> f(n);
  for (int start = 0; start < multistart; ++start) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(start));
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform01(i);

    // The damped map repels saddle-type rest points, so the raw start is
    // polished too; otherwise the census would only ever see attractors.
    const std::optional<PolishResult> from_start = newton_polish(x, gpi, n);

    bool escaped = false;
    std::optional<PolishResult> from_end;
    for (int iter = 0; iter < 100000; ++iter) {
      mean_field_interior(x, gpi, f);
      if (inf_norm(f) <= 1e-9) break;
      bool out_of_margin = false;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += 0.5 * f[i];
        if (x[i] < 1e-6 || x[i] > 1.0 - 1e-6) out_of_margin = true;
      }
      if (out_of_margin) {
        escaped = true;
        break;
      }
    }
    if (escaped) {
      ++set.boundary_escapes;
    } else {
      from_end = newton_polish(x, gpi, n);
    }

    bool any = false;
    if (from_end && interior_point(from_end->x)) {
      set.interior[static_cast<std::size_t>(admit(*from_end))].basin_count += 1;
      any = true;
    }
    if (from_start && interior_point(from_start->x)) {
      admit(*from_start);
      any = true;
    }
    if (!any && !escaped) ++set.dropped;
  }

  std::sort(set.interior.begin(), set.interior.end(),
            [](const InteriorEquilibrium& a, const InteriorEquilibrium& b) {
              return a.x < b.x;
            });
  for (const UnreliabilityVector& b : boundary_equilibria(pi))
    set.boundary.push_back(BoundaryEquilibrium{b.values()});
  return set;
}

bool equilibrium_bounds_check(const std::vector<double>& x,
                              const std::vector<double>& pi, double slack) {
  if (x.size() != pi.size())
    throw std::invalid_argument("equilibrium_bounds_check: size mismatch");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double bound = agreement_prob(pi[i], 1.0 - pi[j]);
      if (std::abs(x[i] - x[j]) > bound + slack) return false;
      if (bound > x[i] + x[j] + slack) return false;
    }
  }
  return true;
}

}  // namespace credence
