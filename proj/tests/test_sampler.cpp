#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spectel/errors.hpp"
#include "spectel/sampler.hpp"

using namespace spectel;
using spectel::testing::ramp_target;

TEST_CASE("exact draws follow the target") {
  const FiniteTarget t = ramp_target();
  Rng rng(2);
  std::vector<double> counts(t.num_states(), 0.0);
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) counts[t.flat_index(exact_draw(t, rng))] += 1.0;
  double chi2 = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const double e = draws * t.probs()[s];
    chi2 += (counts[s] - e) * (counts[s] - e) / e;
  }
  // 0.001 critical value of chi-square with 11 degrees of freedom.
  CHECK(chi2 <= 31.26);
}

TEST_CASE("Gibbs chain frequencies over 1e6 steps match the target") {
  const FiniteTarget t = ramp_target();
  Rng rng(17);
  auto x = exact_draw(t, rng);
  std::vector<double> counts(t.num_states(), 0.0);
  // Thinning by 20 steps leaves nearly independent states (Gap(3,1) is about 0.29).
  const int steps = 1000000, thin = 20;
  for (int k = 1; k <= steps; ++k) {
    gibbs_update(t, x, 1, rng);
    if (k % thin == 0) counts[t.flat_index(x)] += 1.0;
  }
  double chi2 = 0.0;
  const double kept = steps / thin;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const double e = kept * t.probs()[s];
    chi2 += (counts[s] - e) * (counts[s] - e) / e;
  }
  CHECK(chi2 <= 31.26);
}

TEST_CASE("block updates touch at most l coordinates") {
  const FiniteTarget t = ramp_target();
  Rng rng(5);
  auto x = exact_draw(t, rng);
  for (int k = 0; k < 1000; ++k) {
    const auto before = x;
    gibbs_update(t, x, 2, rng);
    int changed = 0;
    for (std::size_t i = 0; i < 3; ++i) changed += before[i] != x[i];
    CHECK(changed <= 2);
    CHECK(t.prob(x) > 0.0);
  }
  CHECK_THROWS_AS(gibbs_update(t, x, 0, rng), DomainError);
  CHECK_THROWS_AS(gibbs_update(t, x, 4, rng), DomainError);
}
