#include <doctest.h>

#include "helpers.hpp"
#include "spectel/errors.hpp"
#include "spectel/report.hpp"

using namespace spectel;

TEST_CASE("finite report is self-contained") {
  const FiniteTarget p = product_target({{0.3, 0.7}, {0.2, 0.5, 0.3}, {0.6, 0.4}});
  const RunResult r = verify_finite({p, testing::ramp_target()}, 1, 42);
  CHECK(r.pass);
  for (const char* key : {"tool", "version", "seed", "rng", "tolerances", "wall_clock_seconds", "checks", "pass"})
    CHECK(r.report.contains(key));
  CHECK(r.report["seed"] == 42);
  CHECK(r.report["targets"].size() == 2);
  CHECK(r.report["targets"][0]["bounds"]["bounds"]["exact"].get<double>() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("failing checks propagate to the report") {
  BoundTolerances strict;
  // A negative floor cannot be met by the exact zero residual of a product target.
  strict.telescope = -1.0;
  const FiniteTarget p = product_target({{0.3, 0.7}, {0.5, 0.5}, {0.6, 0.4}});
  const RunResult r = verify_finite({p}, 1, 0, strict);
  CHECK_FALSE(r.pass);
}

TEST_CASE("cube suite input checks") {
  CubeOptions o;
  o.n = 9;
  CHECK_THROWS_AS(verify_cube(o), DomainError);
  o.n = 4;
  o.steps = 1000;
  CHECK_THROWS_AS(verify_cube(o), StatisticalContractError);
}

TEST_CASE("merged report passes iff every input passes") {
  const nlohmann::json ok{{"command", "verify-finite"}, {"seed", 1}, {"pass", true}};
  const nlohmann::json bad{{"command", "verify-cube"}, {"seed", 2}, {"pass", false}};
  CHECK(merge_reports({ok, ok}).pass);
  const RunResult mixed = merge_reports({ok, bad});
  CHECK_FALSE(mixed.pass);
  CHECK(mixed.report["seed"] == nlohmann::json::array({1, 2}));
  CHECK_THROWS_AS(merge_reports({nlohmann::json{{"seed", 3}}}), ParseError);
}
