#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectel/cube_corner.hpp"
#include "spectel/errors.hpp"

using namespace spectel;
using namespace spectel::cube;

TEST_CASE("zeta values") {
  CHECK(zeta(1, 3) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(zeta(2, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  // (-1)^k / C(m + k - 1, k): zeta_4 at m = 5 is 1 / C(8, 4) = 1 / 70.
  CHECK(zeta(4, 5) == doctest::Approx(1.0 / 70.0).epsilon(1e-15));
  CHECK(zeta(3, 2) == doctest::Approx(-1.0 / 4.0).epsilon(1e-15));
  for (std::size_t m = 2; m <= 8; ++m) CHECK(zeta(1, m) == -1.0 / static_cast<double>(m));
  CHECK_THROWS_AS(zeta(0, 3), DomainError);
  CHECK_THROWS_AS(zeta(1, 1), DomainError);
}

TEST_CASE("s bound table") {
  CHECK(prop1_s_bound(2) == 0.75);
  CHECK(prop1_s_bound(3) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(prop1_s_bound(4) == doctest::Approx(0.325).epsilon(1e-15));
  for (std::size_t m = 2; m <= 12; ++m)
    CHECK(std::abs(prop1_s_bound(m) - a_m(m) / static_cast<double>(m)) <= 1e-15);
  CHECK(a_m(2) == 1.5);
  CHECK_THROWS_AS(prop1_s_bound(1), DomainError);
}

TEST_CASE("correlation lower bound") {
  const CorrLowerBound three = corr_gap_lower_bound(3);
  CHECK(three.product == doctest::Approx(5.0 / 36.0).epsilon(1e-15));
  CHECK_FALSE(three.simplified.has_value());
  const CorrLowerBound four = corr_gap_lower_bound(4);
  REQUIRE(four.simplified.has_value());
  CHECK(*four.simplified == doctest::Approx(5.0 / 72.0).epsilon(1e-15));
  for (std::size_t n = 4; n <= 30; ++n) {
    const CorrLowerBound b = corr_gap_lower_bound(n);
    CHECK(*b.simplified <= b.product);
    CHECK(b.product <= 1.0 / static_cast<double>(n));
  }
  CHECK_THROWS_AS(corr_gap_lower_bound(2), DomainError);
}

TEST_CASE("coupling influence matrix") {
  const InfluenceMatrix phi = wasserstein_influence(4);
  CHECK(phi.metric == MetricTag::CubeCornerWasserstein);
  CHECK(spectral_radius(phi.entries) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(spectral_radius(wasserstein_influence(3).entries) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(within_coupling_hypothesis(4));
  CHECK_FALSE(within_coupling_hypothesis(3));
  CHECK(spectral_radius(discrete_influence(4).entries) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(wasserstein_influence(2), DomainError);
}

TEST_CASE("conditional density, cdf and inverse") {
  CHECK(conditional_density({1.0, 2}, 0.25) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(conditional_density({1.0, 2}, 1.25) == 0.0);
  CHECK(sample_conditional({1.0, 1}, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sample_conditional({1.0, 2}, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
  for (double u : {0.01, 0.3, 0.5, 0.77, 0.999}) {
    for (std::size_t m : {1, 2, 5}) {
      const CondSlack s{0.6, m};
      CHECK(conditional_cdf(s, sample_conditional(s, u)) == doctest::Approx(u).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(sample_conditional({1.0, 2}, 0.0), DomainError);
  CHECK_THROWS_AS(sample_conditional({1.0, 2}, 1.0), DomainError);
}

TEST_CASE("inverse-CDF draws pass a Kolmogorov-Smirnov test") {
  Rng rng(8);
  const CondSlack s{0.8, 4};
  std::vector<double> draws(100000);
  for (double& d : draws) d = sample_conditional(s, rng.uniform_open());
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const double f = conditional_cdf(s, draws[k]);
    ks = std::max({ks, std::abs(f - k / n), std::abs(f - (k + 1) / n)});
  }
  // 0.001-level critical value.
  CHECK(ks <= 1.95 / std::sqrt(n));
}

TEST_CASE("orthonormal basis") {
  const OrthoBasis basis(4, 0.7, 8);
  CHECK(basis.degree() == 8);
  for (std::size_t j = 0; j <= 8; ++j)
    for (std::size_t k = 0; k <= 8; ++k)
      CHECK(std::abs(static_cast<double>(basis.inner(j, k)) - (j == k ? 1.0 : 0.0)) <= 1e-12);
  CHECK(basis.coefficients(3).size() == 4);
  CHECK_THROWS_AS(OrthoBasis(4, 0.7, 9), DomainError);
  CHECK_THROWS_AS(OrthoBasis(1, 0.7, 2), DomainError);
  CHECK_THROWS_AS(OrthoBasis(4, 1.5, 2), DomainError);
}

TEST_CASE("eigenrelation of the pair conditional operator") {
  for (std::size_t m = 2; m <= 6; ++m)
    for (double r : {1.0, 0.25}) CHECK(verify_eigenrelation(m, r, 6) <= 1e-8);
}

TEST_CASE("TV closed form against high-precision quadrature") {
  const TvCheck a = tv_check(4, 1.0, 0.2, 0.5);
  CHECK(a.tv_formula == doctest::Approx(0.2060509150219831789).epsilon(1e-14));
  CHECK(a.tv_quadrature == doctest::Approx(0.2060509150219831789).epsilon(1e-10));
  CHECK(a.bound == doctest::Approx(4.0 / 9.0 * 0.6).epsilon(1e-14));

  const TvCheck b = tv_check(5, 0.7, 0.45, 0.1);
  CHECK(b.tv_formula == doctest::Approx(0.3543269181376773584).epsilon(1e-14));
  CHECK(b.tv_quadrature <= b.bound);

  const TvCheck same = tv_check(4, 1.0, 0.3, 0.3);
  CHECK(same.tv_quadrature == 0.0);
  CHECK_THROWS_AS(tv_check(2, 1.0, 0.2, 0.5), DomainError);
  CHECK_THROWS_AS(tv_check(4, 1.0, 0.2, 1.0), DomainError);
}

TEST_CASE("TV bound on random points") {
  Rng rng(31);
  for (std::size_t m = 3; m <= 8; ++m) {
    for (int p = 0; p < 50; ++p) {
      const double r = 0.1 + 0.9 * rng.uniform_open();
      const TvCheck c = tv_check(m, r, r * rng.uniform_open(), r * rng.uniform_open());
      CHECK(std::abs(c.tv_quadrature - c.tv_formula) <= 1e-8);
      CHECK(c.tv_quadrature <= c.bound + 1e-10);
    }
  }
}

TEST_CASE("metric and coupling") {
  CHECK(wasserstein_metric(1.0, 0.2, 0.5) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(wasserstein_metric(1.0, 0.2, 1.0), DomainError);

  Rng rng(4);
  const std::size_t m = 5;
  double mean = 0.0, ratio = 0.0;
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) {
    const auto [a, b] = coupling_sample(1.0, m, 0.2, 0.6, rng);
    CHECK_FALSE(a <= 0.0);
    CHECK(b / a == doctest::Approx(0.4 / 0.8).epsilon(1e-12));
    const double x = a / 0.8;
    mean += x;
    ratio += x / (1.0 - x);
  }
  mean /= draws;
  ratio /= draws;
  // X ~ Beta(1, m - 1): E[X] = 1/m and E[X / (1 - X)] = 1 / (m - 2).
  CHECK(mean == doctest::Approx(1.0 / m).epsilon(0.01));
  CHECK(ratio == doctest::Approx(1.0 / (m - 2)).epsilon(0.02));
  CHECK_THROWS_AS(coupling_sample(1.0, 2, 0.2, 0.6, rng), DomainError);
}

TEST_CASE("coupling contracts the metric") {
  Rng rng(6);
  for (std::size_t m = 4; m <= 7; ++m) {
    const ContractionEstimate e = contraction_ratio(m, 1.0, 0.15, 0.55, 50000, rng);
    CHECK(e.pass());
    CHECK(e.bound == doctest::Approx(1.0 / (m - 2)));
  }
}

TEST_CASE("corner chain stays inside the support") {
  Rng rng(12);
  CornerState s = stationary_draw(5, rng);
  CHECK(s.valid());
  for (int t = 0; t < 20000; ++t) {
    const CornerState next = gibbs_step(s, rng);
    REQUIRE(next.valid());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < 5; ++i) changed += next.x[i] != s.x[i];
    CHECK(changed <= 1);
    s = next;
  }
  CHECK_THROWS_AS(stationary_draw(1, rng), DomainError);
}

TEST_CASE("stationary draws have uniform moments") {
  Rng rng(13);
  const std::size_t n = 3;
  double m1 = 0.0;
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) m1 += stationary_draw(n, rng).x[0];
  // Each coordinate is Beta(1, n): mean 1 / (n + 1).
  CHECK(m1 / draws == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("empirical gap estimate input checks") {
  Rng rng(1);
  CHECK_THROWS_AS(empirical_gap_estimate(4, 1000, rng), StatisticalContractError);
  CHECK_THROWS_AS(empirical_gap_estimate(2, kMinEstimateSteps, rng), DomainError);
  CHECK_THROWS_AS(empirical_gap_estimate(9, kMinEstimateSteps, rng), DomainError);
}

TEST_CASE("empirical gap tracks the slow linear mode") {
  // On linear functions the chain contracts at 1 - 1/(2n).
  Rng rng(21);
  const GapEstimate e = empirical_gap_estimate(4, kMinEstimateSteps, rng);
  CHECK(std::abs(e.gap_estimate - 0.125) <= 4.0 * e.ci + 0.005);
  CHECK(e.fit_lags >= 5);
  CHECK(e.batches == 32);
}

TEST_CASE("conditional density integrates to one") {
  for (std::size_t m : {1, 2, 3, 5, 8}) {
    for (double r : {1.0, 0.6, 0.05}) {
      const CondSlack s{r, m};
      const long double mass = standard_rule().mapped(0.0L, r).integrate(
          [&](long double x) { return static_cast<long double>(conditional_density(s, static_cast<double>(x))); });
      CHECK(std::abs(static_cast<double>(mass) - 1.0) <= 1e-10);
    }
  }
}
