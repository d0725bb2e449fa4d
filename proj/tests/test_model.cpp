#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "credence/model.hpp"
#include "credence/rng.hpp"
#include "credence/types.hpp"
#include "doctest.h"

using namespace credence;

namespace {

std::vector<double> random_interior(const CounterRng& rng, std::uint64_t& ctr,
                                    std::size_t n, double margin = 1e-3) {
  std::vector<double> x(n);
  for (auto& v : x) v = margin + (1.0 - 2.0 * margin) * rng.uniform01(ctr++);
  return x;
}

}  // namespace

TEST_CASE("region classification") {
  CHECK(classify_region({0.3, 0.7}).region == Region::Interior);

  const RegionInfo se = classify_region({0.0, 0.7, 0.4});
  CHECK(se.region == Region::SinglyExtreme);
  CHECK(se.extreme_index == 0);

  const RegionInfo se1 = classify_region({0.2, 1.0, 0.4});
  CHECK(se1.region == Region::SinglyExtreme);
  CHECK(se1.extreme_index == 1);

  CHECK(classify_region({0.0, 1.0, 0.4}).region == Region::Invalid);
  CHECK(classify_region({1.0, 1.0}).region == Region::Invalid);

  CHECK_THROWS_AS(classify_region({}), std::invalid_argument);
  CHECK_THROWS_AS(classify_region({-0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(classify_region({0.5, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(classify_region({std::nan(""), 0.5}), std::invalid_argument);
}

TEST_CASE("unreliability vector basics") {
  const auto half = UnreliabilityVector::half(4);
  CHECK(half.size() == 4);
  CHECK(half.interior());
  for (std::size_t i = 0; i < 4; ++i) CHECK(half[i] == 0.5);

  const UnreliabilityVector pinned({0.3, 1.0, 0.4});
  CHECK(pinned.region() == Region::SinglyExtreme);
  CHECK(pinned.extreme_index() == 1);
  CHECK_FALSE(pinned.interior());

  CHECK_THROWS_AS(UnreliabilityVector({0.5, -0.2}), std::invalid_argument);
}

TEST_CASE("extended real tag discipline") {
  const auto f = ExtendedReal::finite(2.5);
  CHECK(f.is_finite());
  CHECK(f.value() == 2.5);
  CHECK(ExtendedReal::pos_inf().is_pos_inf());
  CHECK(ExtendedReal::neg_inf().is_neg_inf());
  CHECK_THROWS_AS(ExtendedReal::pos_inf().value(), std::logic_error);
  CHECK_THROWS_AS(ExtendedReal::neg_inf().value(), std::logic_error);
}

TEST_CASE("verdict helpers") {
  // mask bit i set means r_i = +1
  const VerdictVector r = verdict_from_mask(0b101, 3);
  CHECK(r == VerdictVector{+1, -1, +1});
  CHECK(verdict_from_mask(0, 2) == VerdictVector{-1, -1});

  CHECK_NOTHROW(validate_verdicts({+1, -1}, 2));
  CHECK_THROWS_AS(validate_verdicts({+1, 0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_verdicts({+1}, 2), std::invalid_argument);

  CHECK_NOTHROW(check_enumeration_cap(20));
  CHECK_THROWS_AS(check_enumeration_cap(21), std::invalid_argument);
}

TEST_CASE("agreement probability") {
  for (double a : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0})
    CHECK(agreement_prob(a, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(agreement_prob(0.0, 0.3) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(agreement_prob(0.1, 0.8) == doctest::Approx(0.26).epsilon(1e-15));
  CHECK(agreement_prob(0.1, 0.8) == agreement_prob(0.8, 0.1));
  CHECK_THROWS_AS(agreement_prob(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(agreement_prob(0.5, 1.1), std::invalid_argument);
}

TEST_CASE("cross entropy") {
  CHECK(cross_entropy(0.5, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  // Gibbs: minimized over the second argument at the first
  const double at_min = cross_entropy(0.3, 0.3);
  for (double x = 0.01; x < 1.0; x += 0.01)
    CHECK(cross_entropy(0.3, x) >= at_min - 1e-15);

  // identity against KL(Bern(0.2), Bern(0.4)) + entropy(Bern(0.2))
  const double a = 0.2, x = 0.4;
  const double kl = a * std::log(a / x) + (1 - a) * std::log((1 - a) / (1 - x));
  const double ent = -a * std::log(a) - (1 - a) * std::log(1 - a);
  CHECK(cross_entropy(a, x) == doctest::Approx(kl + ent).epsilon(1e-14));

  // extreme second argument diverges unless the coefficient vanishes
  CHECK(std::isinf(cross_entropy(0.2, 0.0)));
  CHECK(std::isinf(cross_entropy(0.2, 1.0)));
  CHECK(cross_entropy(0.0, 0.0) == doctest::Approx(0.0));
  CHECK(cross_entropy(1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("log odds") {
  const auto l = log_odds(UnreliabilityVector({0.5, 0.1}));
  CHECK(l[0].value() == doctest::Approx(0.0));
  CHECK(l[1].value() == doctest::Approx(std::log(9.0)).epsilon(1e-15));

  // inverse check: sigmoid(l) recovers 1 - x
  const double s = 1.0 / (1.0 + std::exp(-l[1].value()));
  CHECK(s == doctest::Approx(0.9).epsilon(1e-14));

  const auto lb = log_odds(UnreliabilityVector({0.0, 0.3}));
  CHECK(lb[0].is_pos_inf());
  const auto lt = log_odds(UnreliabilityVector({0.3, 1.0}));
  CHECK(lt[1].is_neg_inf());

  CHECK_THROWS_AS(log_odds(UnreliabilityVector({0.0, 1.0})), std::domain_error);
}

TEST_CASE("likelihood ratio") {
  const VerdictVector any{+1, -1, +1};
  CHECK(likelihood_ratio(any, UnreliabilityVector::half(3)).value() ==
        doctest::Approx(1.0).epsilon(1e-15));

  const UnreliabilityVector x({0.1, 0.5});
  const VerdictVector r{+1, -1};
  CHECK(likelihood_ratio(r, x).value() ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  // same value through the explicit log form
  const auto l = log_odds(x);
  const double inner = l[0].value() * r[0] + l[1].value() * r[1];
  CHECK(likelihood_ratio(r, x).value() ==
        doctest::Approx(std::exp(-inner)).epsilon(1e-14));

  // pinned coordinate resolves the sign exactly
  const UnreliabilityVector xb({0.0, 0.4});
  const auto zero = likelihood_ratio({+1, -1}, xb);
  CHECK(zero.is_finite());
  CHECK(zero.value() == 0.0);
  CHECK(likelihood_ratio({-1, -1}, xb).is_pos_inf());

  const UnreliabilityVector xt({1.0, 0.4});
  CHECK(likelihood_ratio({-1, +1}, xt).value() == 0.0);
  CHECK(likelihood_ratio({+1, +1}, xt).is_pos_inf());
}

TEST_CASE("verdict probability basics") {
  // n=1 is uninformative no matter the rate
  for (double v : {0.02, 0.3, 0.5, 0.77})
    for (int r : {-1, +1})
      CHECK(verdict_prob({r}, UnreliabilityVector({v})) ==
            doctest::Approx(0.5).epsilon(1e-15));

  const UnreliabilityVector x2({0.1, 0.2});
  CHECK(verdict_prob({+1, +1}, x2) == doctest::Approx(0.37).epsilon(1e-14));

  // normalization at a reference interior point
  const UnreliabilityVector x3({0.1, 0.2, 0.3});
  double total = 0.0;
  for (std::uint32_t m = 0; m < 8; ++m) total += verdict_prob(verdict_from_mask(m, 3), x3);
  CHECK(std::abs(total - 1.0) <= 1e-12);

  CHECK_THROWS_AS(verdict_prob({+1, +1}, UnreliabilityVector({0.0, 1.0})),
                  std::domain_error);
}

TEST_CASE("verdict probability symmetries and form equivalence") {
  const CounterRng rng(2024, 1);
  std::uint64_t ctr = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 25; ++rep) {
      const UnreliabilityVector x(random_interior(rng, ctr, n));
      const UnreliabilityVector mirror([&] {
        std::vector<double> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = 1.0 - x[i];
        return m;
      }());
      double total = 0.0;
      for (std::uint32_t m = 0; m < (1u << n); ++m) {
        const VerdictVector r = verdict_from_mask(m, n);
        VerdictVector neg(r);
        for (auto& v : neg) v = -v;
        const double g = verdict_prob(r, x);
        CHECK(std::abs(g - verdict_prob(neg, x)) <= 1e-15);        // sign flip
        CHECK(std::abs(g - verdict_prob(r, mirror)) <= 1e-12);     // parameter flip
        CHECK(std::abs(g - verdict_prob_cosh(r, x)) <= 1e-12);     // closed form
        total += g;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("verdict probability at a pinned coordinate") {
  // reduced form still normalizes and agrees with the interior limit
  const UnreliabilityVector xb({0.0, 0.35, 0.8});
  double total = 0.0;
  for (std::uint32_t m = 0; m < 8; ++m) {
    const VerdictVector r = verdict_from_mask(m, 3);
    const double g = verdict_prob(r, xb);
    total += g;
    const double near = verdict_prob(r, UnreliabilityVector({1e-6, 0.35, 0.8}));
    const double nearer = verdict_prob(r, UnreliabilityVector({1e-9, 0.35, 0.8}));
    const double extrap = nearer + (nearer - near) * 1e-9 / (1e-6 - 1e-9);
    CHECK(std::abs(g - extrap) <= 1e-5);
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("indistinguishable parameter pairs") {
  const UnreliabilityVector pi({0.1, 0.2, 0.3});
  const UnreliabilityVector mirror({0.9, 0.8, 0.7});
  CHECK(indistinguishable(pi, pi, 1e-12));
  CHECK(indistinguishable(mirror, pi, 1e-12));
  CHECK_FALSE(indistinguishable(UnreliabilityVector({0.1, 0.2, 0.31}), pi, 1e-9));
}

TEST_CASE("pairwise residuals") {
  const std::vector<double> pi{0.1, 0.2, 0.3};
  for (double v : pairwise_residuals(pi, pi)) CHECK(v == 0.0);

  std::vector<double> mirror{0.9, 0.8, 0.7};
  for (double v : pairwise_residuals(mirror, pi))
    CHECK(std::abs(v) <= 1e-15);

  // row-major pair order (1,2), (1,3), (2,3)
  const std::vector<double> x{0.5, 0.2, 0.3};
  const auto res = pairwise_residuals(x, pi);
  REQUIRE(res.size() == 3);
  CHECK(res[0] == doctest::Approx(0.0 - 0.4 * 0.3).epsilon(1e-14));
  CHECK(res[1] == doctest::Approx(0.0 - 0.4 * 0.2).epsilon(1e-14));
  CHECK(res[2] == doctest::Approx(0.3 * 0.2 - 0.3 * 0.2).epsilon(1e-14));
}
