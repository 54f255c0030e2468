#include <doctest.h>

#include <cmath>

#include "spectel/quadrature.hpp"

using namespace spectel;

TEST_CASE("Gauss-Legendre exactness") {
  const QuadratureRule rule = gauss_legendre(5);
  long double total = 0.0L;
  for (auto w : rule.weights) total += w;
  CHECK(static_cast<double>(total) == doctest::Approx(2.0).epsilon(1e-16));
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(static_cast<double>(rule.nodes[k] + rule.nodes[4 - k])) <= 1e-18);

  // Degree 9 is the highest degree integrated exactly by five nodes.
  const long double x9 = rule.mapped(0.0L, 1.0L).integrate([](long double x) { return std::pow(x, 9.0L); });
  CHECK(static_cast<double>(x9) == doctest::Approx(0.1).epsilon(1e-16));
  const long double x10 = rule.mapped(0.0L, 1.0L).integrate([](long double x) { return std::pow(x, 10.0L); });
  CHECK(std::abs(static_cast<double>(x10) - 1.0 / 11.0) > 1e-8);
}

TEST_CASE("single-node rule is the midpoint rule") {
  const QuadratureRule rule = gauss_legendre(1);
  REQUIRE(rule.size() == 1);
  CHECK(static_cast<double>(rule.nodes[0]) == 0.0);
  CHECK(static_cast<double>(rule.weights[0]) == 2.0);
}

TEST_CASE("standard rule integrates smooth functions") {
  const QuadratureRule& rule = standard_rule();
  CHECK(rule.size() == 256);
  const long double v = rule.mapped(0.0L, 3.0L).integrate([](long double x) { return std::exp(-x); });
  CHECK(static_cast<double>(v) == doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-15));
}
