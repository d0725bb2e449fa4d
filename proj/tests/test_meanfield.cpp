#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "credence/estimator.hpp"
#include "credence/harness.hpp"
#include "credence/lyapunov.hpp"
#include "credence/meanfield.hpp"
#include "credence/model.hpp"
#include "credence/rng.hpp"
#include "credence/types.hpp"
#include "doctest.h"

using namespace credence;

namespace {

const UnreliabilityVector kPi({0.1, 0.2, 0.3});

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("expected update vanishes at the known rest points") {
  CHECK(inf_norm(mean_field(kPi, kPi)) <= 1e-14);
  CHECK(inf_norm(mean_field(UnreliabilityVector({0.9, 0.8, 0.7}), kPi)) <= 1e-14);
  CHECK(inf_norm(mean_field(UnreliabilityVector::half(3), kPi)) <= 1e-14);
}

TEST_CASE("mirror antisymmetry of the expected update") {
  const CounterRng rng(7, 3);
  std::uint64_t ctr = 0;
  const UnreliabilityVector pi4({0.12, 0.25, 0.33, 0.41});
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> xv(4), mv(4);
    for (std::size_t i = 0; i < 4; ++i) {
      xv[i] = 0.01 + 0.98 * rng.uniform01(ctr++);
      mv[i] = 1.0 - xv[i];
    }
    const auto f = mean_field(UnreliabilityVector(xv), pi4);
    const auto g = mean_field(UnreliabilityVector(mv), pi4);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(f[i] + g[i]) <= 1e-13);
  }
}

TEST_CASE("expected update at a pinned coordinate") {
  const auto f = mean_field(UnreliabilityVector({0.0, 0.5, 0.9}), kPi);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(-0.24).epsilon(1e-14));
  CHECK(f[2] == doctest::Approx(-0.56).epsilon(1e-14));

  // continuity: interior value just off the face approaches the pinned form
  const auto near = mean_field(UnreliabilityVector({1e-9, 0.5, 0.9}), kPi);
  for (std::size_t i = 1; i < 3; ++i) CHECK(std::abs(f[i] - near[i]) <= 1e-6);
}

TEST_CASE("expected update matches a sampled average") {
  const UnreliabilityVector x({0.35, 0.55, 0.25});
  const auto f = mean_field(x, kPi);
  const StreamSampler sampler(kPi, 515);
  const std::int64_t draws = 200000;
  std::vector<double> mean(3, 0.0), sq(3, 0.0);
  for (std::int64_t t = 0; t < draws; ++t) {
    const auto g = soft_update(sampler.sample(t).r, x);
    for (std::size_t i = 0; i < 3; ++i) {
      mean[i] += g[i];
      sq[i] += g[i] * g[i];
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    mean[i] /= static_cast<double>(draws);
    const double var = sq[i] / static_cast<double>(draws) - mean[i] * mean[i];
    const double band = 4.0 * std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
    CHECK(std::abs(mean[i] - f[i]) <= band);
  }
}

TEST_CASE("pinned rest points") {
  const auto pts = boundary_equilibria(kPi);
  REQUIRE(pts.size() == 6);

  // first agent distrusted completely: the others land on agreement rates
  CHECK(pts[0][0] == 0.0);
  CHECK(pts[0][1] == doctest::Approx(0.26).epsilon(1e-14));
  CHECK(pts[0][2] == doctest::Approx(0.34).epsilon(1e-14));
  CHECK(pts[1][0] == 1.0);
  CHECK(pts[1][1] == doctest::Approx(0.74).epsilon(1e-14));
  CHECK(pts[1][2] == doctest::Approx(0.66).epsilon(1e-14));

  for (std::size_t k = 0; k < pts.size(); k += 2) {
    // the two pins of one agent mirror each other
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(pts[k][i] == doctest::Approx(1.0 - pts[k + 1][i]).epsilon(1e-14));
  }
  for (const auto& p : pts) {
    CHECK(inf_norm(mean_field(p, kPi)) <= 1e-12);
    CHECK(equilibrium_bounds_check(p.values(), kPi.values(), 1e-9));
  }
}

TEST_CASE("flow from a rest point stays put") {
  const auto flow = ode_flow(kPi, kPi, 10.0, 0.01, 100);
  CHECK_FALSE(flow.aborted);
  for (const auto& s : flow.samples) {
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(s.x[i] == doctest::Approx(kPi[i]).epsilon(1e-10));
    CHECK(s.v <= 1e-12);
  }
}

TEST_CASE("flow descends and settles") {
  const UnreliabilityVector x0({0.11, 0.21, 0.31});
  const auto flow = ode_flow(x0, kPi, 200.0, 0.01, 1000);
  CHECK_FALSE(flow.aborted);
  REQUIRE(flow.samples.size() >= 2);
  CHECK(flow.samples.front().s == 0.0);
  CHECK(flow.samples.back().s == doctest::Approx(200.0));
  for (std::size_t k = 1; k < flow.samples.size(); ++k)
    CHECK(flow.samples[k].v <= flow.samples[k - 1].v + 1e-8 * (1.0 + std::abs(flow.samples[k - 1].v)));
  CHECK(census_distance(flow.samples.back().x, kPi) <= 1e-4);
}

TEST_CASE("flows of a point and its mirror are mirror images") {
  const UnreliabilityVector a({0.3, 0.6, 0.45});
  const UnreliabilityVector b({0.7, 0.4, 0.55});
  const auto fa = ode_flow(a, kPi, 5.0, 0.01, 100);
  const auto fb = ode_flow(b, kPi, 5.0, 0.01, 100);
  REQUIRE(fa.samples.size() == fb.samples.size());
  for (std::size_t k = 0; k < fa.samples.size(); ++k)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(fa.samples[k].x[i] == doctest::Approx(1.0 - fb.samples[k].x[i]).epsilon(1e-10));
}

TEST_CASE("flow with a pinned coordinate holds it") {
  const auto flow = ode_flow(UnreliabilityVector({0.0, 0.5, 0.9}), kPi, 300.0, 0.01, 5000);
  CHECK_FALSE(flow.aborted);
  for (const auto& s : flow.samples) CHECK(s.x[0] == 0.0);
  const auto& end = flow.samples.back().x;
  CHECK(end[1] == doctest::Approx(0.26).epsilon(1e-6));
  CHECK(end[2] == doctest::Approx(0.34).epsilon(1e-6));
}

TEST_CASE("flow argument validation") {
  CHECK_THROWS_AS(ode_flow(kPi, kPi, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ode_flow(kPi, kPi, -1.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(ode_flow(kPi, kPi, 1.0, 0.01, 0), std::invalid_argument);
  const auto flow = ode_flow(kPi, kPi, 0.0, 0.01);
  REQUIRE(flow.samples.size() == 1);
  CHECK(flow.samples[0].s == 0.0);
}

TEST_CASE("rest point census") {
  const auto set = find_equilibria(kPi, 200, 7);
  CHECK(set.starts == 200);
  REQUIRE(set.interior.size() == 3);
  REQUIRE(set.boundary.size() == 6);

  auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m <= 1e-6;
  };
  const std::vector<std::vector<double>> expected{
      {0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}, {0.5, 0.5, 0.5}};
  for (const auto& want : expected) {
    bool found = false;
    for (const auto& got : set.interior) found = found || close(got.x, want);
    CHECK(found);
  }
  for (const auto& pt : set.interior) {
    CHECK(pt.residual <= 1e-10);
    CHECK(equilibrium_bounds_check(pt.x, kPi.values(), 1e-9));
    // mirror closure
    std::vector<double> m(pt.x);
    for (auto& v : m) v = 1.0 - v;
    bool mirrored = false;
    for (const auto& other : set.interior) mirrored = mirrored || close(other.x, m);
    CHECK(mirrored);
  }
  int basin_total = 0;
  for (const auto& pt : set.interior) basin_total += pt.basin_count;
  CHECK(basin_total <= set.starts);
  CHECK(set.dropped >= 0);

  CHECK_THROWS_AS(find_equilibria(UnreliabilityVector({0.1, 0.2, 0.3, 0.1, 0.2, 0.3,
                                                       0.1, 0.2, 0.3}),
                                  10, 1),
                  std::invalid_argument);
}

TEST_CASE("pairwise rest point bounds") {
  CHECK(equilibrium_bounds_check(kPi.values(), kPi.values()));
  CHECK(equilibrium_bounds_check({0.5, 0.5, 0.5}, kPi.values()));
  CHECK_FALSE(equilibrium_bounds_check({0.99, 0.01, 0.5}, kPi.values()));
}
