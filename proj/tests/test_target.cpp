#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "spectel/errors.hpp"
#include "spectel/target.hpp"

using namespace spectel;
using spectel::testing::ramp_target;
using spectel::testing::random_target;
using spectel::testing::small_target;

TEST_CASE("marginal and conditional of a 2x2 target") {
  const FiniteTarget t = small_target();
  const Tensor m0 = marginal(t, {0});
  REQUIRE(m0.values.size() == 2);
  CHECK(m0.values[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(m0.values[1] == doctest::Approx(0.6).epsilon(1e-14));

  const Tensor c = conditional(t, {1}, CondContext{{0}, {0}});
  CHECK(c.values[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c.values[1] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("row-major layout with the last axis fastest") {
  const FiniteTarget t = ramp_target();
  const std::vector<std::size_t> x{1, 2, 1};
  CHECK(t.flat_index(x) == 11);
  CHECK(t.prob(x) == doctest::Approx(12.0 / 78.0));
  for (std::size_t flat = 0; flat < t.num_states(); ++flat) {
    std::vector<std::size_t> y(3);
    t.decode(flat, y);
    CHECK(t.flat_index(y) == flat);
  }
}

TEST_CASE("full index set marginal is the joint") {
  const FiniteTarget t = ramp_target();
  const Tensor full = marginal(t, {0, 1, 2});
  CHECK(full.values == std::vector<double>(t.probs().begin(), t.probs().end()));
}

TEST_CASE("ingest validation") {
  CHECK_THROWS_AS(FiniteTarget({2}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(FiniteTarget({2, 1}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(FiniteTarget({2, 2}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(FiniteTarget({2, 2}, {0.5, 0.5, 0.5, -0.5}), DomainError);
  CHECK_THROWS_AS(FiniteTarget({2, 2}, {0.3, 0.3, 0.3, 0.3}), DomainError);
  CHECK_THROWS_AS(FiniteTarget({2, 2}, {0.25, 0.25, NAN, 0.25}), DomainError);

  const FiniteTarget t({2, 2}, {0.25, 0.25, 0.25, 0.25 + 5e-10});
  const double total = std::accumulate(t.probs().begin(), t.probs().end(), 0.0);
  CHECK(std::abs(total - 1.0) <= 1e-15);
}

TEST_CASE("JSON ingestion errors") {
  CHECK_THROWS_AS(FiniteTarget::from_json("{\"axes\": [2, 2], \"probs\": [0.25, 0.2"), ParseError);
  CHECK_THROWS_AS(FiniteTarget::from_json("[1, 2]"), ParseError);
  CHECK_THROWS_AS(FiniteTarget::from_json("{\"axes\": \"2x2\", \"probs\": []}"), ParseError);
  CHECK_THROWS_AS(FiniteTarget::from_json("{\"axes\": [2, 2], \"probs\": [0.25, \"a\", 0.25, 0.25]}"), ParseError);
  CHECK_THROWS_AS(FiniteTarget::from_json("{\"axes\": [2, 2], \"probs\": [0.25, 0.25, 0.25, 0.2]}"), DomainError);

  const FiniteTarget t = ramp_target();
  const FiniteTarget back = FiniteTarget::from_json(t.to_json().dump());
  CHECK(std::vector<double>(back.probs().begin(), back.probs().end()) ==
        std::vector<double>(t.probs().begin(), t.probs().end()));
}

TEST_CASE("context validation") {
  const FiniteTarget t = ramp_target();
  CHECK_THROWS_AS(validate_context(t, CondContext{{0, 1, 2}, {0, 0, 0}}), DomainError);
  CHECK_THROWS_AS(validate_context(t, CondContext{{1, 0}, {0, 0}}), DomainError);
  CHECK_THROWS_AS(validate_context(t, CondContext{{1}, {3}}), DomainError);
  CHECK_THROWS_AS(validate_context(t, CondContext{{3}, {0}}), DomainError);
  CHECK_THROWS_AS(conditional(t, {1}, CondContext{{1}, {0}}), DomainError);
}

TEST_CASE("zero-mass contexts condition to the uniform law") {
  const FiniteTarget t({2, 3}, {0.5, 0.25, 0.25, 0.0, 0.0, 0.0});
  CHECK_FALSE(is_supported(t, CondContext{{0}, {1}}));
  const Tensor c = conditional(t, {1}, CondContext{{0}, {1}});
  for (double v : c.values) CHECK(v == doctest::Approx(1.0 / 3.0));

  const auto ctxs = supported_contexts(t, 1);
  // Coordinate 0 can only be 0; coordinate 1 takes all three values.
  REQUIRE(ctxs.size() == 4);
  CHECK(ctxs[0] == CondContext{{0}, {0}});
  CHECK(ctxs[1] == CondContext{{1}, {0}});
  CHECK(ctxs[3] == CondContext{{1}, {2}});
}

TEST_CASE("supported contexts of size zero") {
  const auto ctxs = supported_contexts(ramp_target(), 0);
  REQUIRE(ctxs.size() == 1);
  CHECK(ctxs[0].lambda.empty());
}

TEST_CASE("index set helpers") {
  CHECK(complement(4, {1, 3}) == IndexSet{0, 2});
  CHECK(set_union({0, 2}, {1, 2}) == IndexSet{0, 1, 2});
  const auto subsets = subsets_of_size({0, 1, 2, 3}, 2);
  REQUIRE(subsets.size() == 6);
  CHECK(subsets.front() == IndexSet{0, 1});
  CHECK(subsets[1] == IndexSet{0, 2});
  CHECK(subsets.back() == IndexSet{2, 3});
  CHECK(extend_context(CondContext{{2}, {1}}, 0, 1) == CondContext{{0, 2}, {1, 1}});
}

TEST_CASE("external context indices are one-based") {
  const auto j = context_to_json(CondContext{{0, 2}, {1, 0}});
  CHECK(j["lambda"] == nlohmann::json::array({1, 3}));
  CHECK(j["y"] == nlohmann::json::array({1, 0}));
}

TEST_CASE("conditional laws sum to one, chain rule and marginal consistency") {
  Rng rng(20240611);
  for (int trial = 0; trial < 30; ++trial) {
    const FiniteTarget t = random_target(rng, 3 + trial % 2, 3);
    const std::size_t n = t.dims();
    for (std::size_t size = 1; size + 1 <= n; ++size) {
      for (const auto& ctx : supported_contexts(t, size)) {
        const IndexSet free = complement(n, ctx.lambda);
        for (std::size_t k = 1; k <= free.size(); ++k) {
          for (const auto& gamma : subsets_of_size(free, k)) {
            const Tensor c = conditional(t, gamma, ctx);
            CHECK(std::abs(std::accumulate(c.values.begin(), c.values.end(), 0.0) - 1.0) <= 1e-12);

            // pi_{Lambda u Gamma}(y, z) = pi_Lambda(y) pi_{Gamma|Lambda}(z|y).
            const IndexSet joint_set = set_union(ctx.lambda, gamma);
            const Tensor joint = marginal(t, joint_set);
            const double mass = context_mass(t, ctx);
            for (std::size_t z = 0; z < c.values.size(); ++z) {
              CondContext full = ctx;
              std::size_t rest = z;
              std::vector<std::size_t> digits(gamma.size());
              for (std::size_t g = gamma.size(); g-- > 0;) {
                digits[g] = rest % t.axis(gamma[g]);
                rest /= t.axis(gamma[g]);
              }
              for (std::size_t g = 0; g < gamma.size(); ++g) full = extend_context(full, gamma[g], digits[g]);
              std::size_t flat = 0;
              for (std::size_t a = 0; a < joint_set.size(); ++a) flat = flat * t.axis(joint_set[a]) + full.y[a];
              CHECK(std::abs(joint.values[flat] - mass * c.values[z]) <= 1e-12);
            }
          }
        }
      }
    }

    // marginal(Gamma) = sum_y pi_Lambda(y) pi_{Gamma|Lambda}(.|y).
    const Tensor direct = marginal(t, {n - 1});
    std::vector<double> mixed(direct.values.size(), 0.0);
    for (const auto& ctx : supported_contexts(t, 1)) {
      if (ctx.lambda[0] != 0) continue;
      const Tensor c = conditional(t, {n - 1}, ctx);
      for (std::size_t z = 0; z < mixed.size(); ++z) mixed[z] += context_mass(t, ctx) * c.values[z];
    }
    for (std::size_t z = 0; z < mixed.size(); ++z) CHECK(std::abs(mixed[z] - direct.values[z]) <= 1e-12);
  }
}

TEST_CASE("product of marginals reproduces a product target") {
  const FiniteTarget p = product_target({{0.3, 0.7}, {0.2, 0.5, 0.3}});
  const FiniteTarget q = product_of_marginals(p);
  for (std::size_t k = 0; k < p.num_states(); ++k) CHECK(std::abs(p.probs()[k] - q.probs()[k]) <= 1e-15);
}

TEST_CASE("random Dirichlet targets are seed-determined with full support") {
  Rng a(5), b(5);
  const FiniteTarget x = random_dirichlet_target({3, 2, 2}, a);
  const FiniteTarget y = random_dirichlet_target({3, 2, 2}, b);
  CHECK(std::vector<double>(x.probs().begin(), x.probs().end()) ==
        std::vector<double>(y.probs().begin(), y.probs().end()));
  for (double p : x.probs()) CHECK(p > 0.0);
}
