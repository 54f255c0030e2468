#include "spectel/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include "spectel/check.hpp"
#include "spectel/cube_corner.hpp"
#include "spectel/errors.hpp"
#include "spectel/rng.hpp"

namespace spectel {

namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kExactTolerance = 1e-14;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json envelope(const std::string& command, std::uint64_t seed) {
  return Json{{"tool", "spectel"},
              {"version", version_string()},
              {"command", command},
              {"seed", seed},
              {"rng", std::string(Rng::family)},
              {"started_at", utc_timestamp()}};
}

RunResult finish(Json report, const std::vector<Check>& checks, Clock::time_point start) {
  Json list = Json::array();
  bool pass = true;
  for (const auto& c : checks) {
    list.push_back(to_json(c));
    pass = pass && c.pass;
  }
  report["checks"] = std::move(list);
  report["pass"] = pass;
  report["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  return RunResult{std::move(report), pass};
}

// 1 / C(m + k - 1, k) with the sign (-1)^k, in exact integer arithmetic.
double zeta_closed_form(std::size_t k, std::size_t m) {
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = c * (m - 1 + i) / i;
  return (k % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(c);
}

std::string m_tag(std::size_t m) { return "(m=" + std::to_string(m) + ")"; }

} // namespace

const char* version_string() { return SPECTEL_VERSION_STRING; }

RunResult verify_finite(const std::vector<FiniteTarget>& targets, std::size_t l, std::uint64_t seed,
                        const BoundTolerances& tol) {
  const auto start = Clock::now();
  Json report = envelope("verify-finite", seed);
  report["tolerances"] = to_json(tol);
  report["l"] = l;

  std::vector<Check> checks;
  Json entries = Json::array();
  double min_residual = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const BoundReport bounds = assemble_bounds(targets[t], l, tol);
    min_residual = std::min(min_residual, bounds.telescope.min_residual());
    std::size_t failed = 0;
    for (const auto& c : bounds.checks) failed += c.pass ? 0 : 1;
    failed += bounds.telescope.all_pass ? 0 : 1;
    checks.push_back(check_at_most("target[" + std::to_string(t) + "]_failed_checks", static_cast<double>(failed), 0.0));
    entries.push_back(Json{{"index", t}, {"target", targets[t].to_json()}, {"bounds", bounds.to_json()}});
  }
  report["targets"] = std::move(entries);
  if (!targets.empty()) report["min_telescope_residual"] = min_residual;
  return finish(std::move(report), checks, start);
}

RunResult verify_cube(const CubeOptions& options) {
  const std::size_t n = options.n;
  if (n < 3 || n > 8) throw DomainError("verify-cube needs 3 <= n <= 8");
  if (options.steps < cube::kMinEstimateSteps) {
    throw StatisticalContractError("insufficient samples: " + std::to_string(options.steps) +
                                   " steps requested, at least " + std::to_string(cube::kMinEstimateSteps) +
                                   " required");
  }
  const auto start = Clock::now();
  Json report = envelope("verify-cube", options.seed);
  report["n"] = n;
  report["steps"] = options.steps;
  report["tolerances"] = Json{{"exact", kExactTolerance}, {"eigenrelation", 1e-8}, {"tv_agreement", 1e-8},
                              {"tv_bound", 1e-10}, {"contraction_se", 3.0}};
  std::vector<Check> checks;

  // Closed forms.
  double zeta_err = 0.0, prop_err = 0.0;
  Json table = Json::array();
  for (std::size_t m = 2; m <= n; ++m) {
    for (std::size_t k = 1; k <= options.eigen_degree; ++k)
      zeta_err = std::max(zeta_err, std::abs(cube::zeta(k, m) - zeta_closed_form(k, m)));
    const double prop = cube::prop1_s_bound(m);
    prop_err = std::max(prop_err, std::abs(prop - cube::a_m(m) / static_cast<double>(m)));
    table.push_back(Json{{"m", m}, {"zeta1", cube::zeta(1, m)}, {"zeta2", cube::zeta(2, m)},
                         {"A_m", cube::a_m(m)}, {"s_bound", prop}});
  }
  report["s_bound_table"] = std::move(table);
  checks.push_back(check_at_most("zeta_recursion_vs_factorial_form", zeta_err, kExactTolerance));
  checks.push_back(check_at_most("s_bound_vs_A_m_over_m", prop_err, kExactTolerance));
  checks.push_back(check_at_most("s_bound(m=2)_is_3/4", std::abs(cube::prop1_s_bound(2) - 0.75), kExactTolerance));

  // Eigenrelation of the pair conditional operator.
  Json eigen = Json::array();
  for (std::size_t m = 2; m <= n; ++m) {
    for (double r : {1.0, 0.37}) {
      double residual = 0.0;
      std::string detail;
      try {
        residual = cube::verify_eigenrelation(m, r, options.eigen_degree);
      } catch (const NumericalContractError& e) {
        residual = std::numeric_limits<double>::infinity();
        detail = e.what();
      }
      eigen.push_back(Json{{"m", m}, {"R", r}, {"K", options.eigen_degree}, {"residual", residual}});
      checks.push_back(check_at_most("eigenrelation" + m_tag(m) + "(R=" + std::to_string(r) + ")", residual, 1e-8, detail));
    }
  }
  report["eigenrelation"] = std::move(eigen);

  // Correlation-route lower bound on Gap(n, 1).
  const cube::CorrLowerBound corr = cube::corr_gap_lower_bound(n);
  const double lower = corr.simplified.value_or(corr.product);
  report["corr_bound"] = Json{{"product", corr.product},
                              {"simplified", corr.simplified ? Json(*corr.simplified) : Json(nullptr)},
                              {"lower_bound", lower},
                              {"form", corr.simplified ? "simplified" : "product"}};
  if (corr.simplified) checks.push_back(check_at_most("simplified_floor_below_product", *corr.simplified, corr.product));

  // TV hypothesis and coupling contraction.
  Rng rng(options.seed);
  Json tv = Json::array(), contraction = Json::array(), influence = Json::array();
  Json beyond = Json::array();
  for (std::size_t m = 3; m <= n; ++m) {
    const bool certified = cube::within_coupling_hypothesis(m);
    double worst_gap = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    std::string first_failure;
    for (std::size_t p = 0; p < options.tv_points; ++p) {
      const double r = 0.2 + 0.8 * rng.uniform_open();
      const double x = r * rng.uniform_open();
      const double x2 = r * rng.uniform_open();
      try {
        const cube::TvCheck c = cube::tv_check(m, r, x, x2);
        worst_gap = std::max(worst_gap, std::abs(c.tv_quadrature - c.tv_formula));
        worst_excess = std::max(worst_excess, c.tv_quadrature - c.bound);
      } catch (const NumericalContractError& e) {
        if (failures++ == 0) first_failure = e.what();
      }
    }
    tv.push_back(Json{{"m", m}, {"points", options.tv_points}, {"max_formula_gap", worst_gap},
                      {"max_bound_excess", worst_excess}, {"failures", failures}});
    checks.push_back(check_at_most("tv_check_failures" + m_tag(m), static_cast<double>(failures), 0.0, first_failure));

    const double x = 0.8 * rng.uniform_open();
    const double x2 = 0.8 * rng.uniform_open();
    const cube::ContractionEstimate est = cube::contraction_ratio(m, 1.0, x, x2, options.contraction_draws, rng);
    Json entry{{"m", m}, {"x", x}, {"x2", x2}, {"mean_ratio", est.mean_ratio}, {"standard_error", est.standard_error},
               {"bound", est.bound}, {"draws", est.draws}, {"pass", est.pass()}};

    const InfluenceMatrix phi = cube::wasserstein_influence(m);
    const double radius = spectral_radius(phi.entries);
    const double exact = (static_cast<double>(m) - 1.0) / (static_cast<double>(m) - 2.0);
    Json inf{{"m", m}, {"metric", metric_name(phi.metric)}, {"spectral_radius", radius}, {"exact", exact},
             {"local_gap_bound", (static_cast<double>(m) - 1.0 - radius) / static_cast<double>(m)}};
    if (certified) {
      checks.push_back(check_at_most("contraction_ratio" + m_tag(m), est.mean_ratio, est.bound + 3.0 * est.standard_error));
      checks.push_back(check_at_most("influence_radius" + m_tag(m), std::abs(radius - exact), kExactTolerance));
    } else {
      entry["status"] = "beyond stated hypothesis";
      inf["status"] = "beyond stated hypothesis";
      beyond.push_back(Json{{"m", m}, {"contraction_pass", est.pass()},
                            {"influence_radius_error", std::abs(radius - exact)}});
    }
    contraction.push_back(std::move(entry));
    influence.push_back(std::move(inf));
  }
  report["tv"] = std::move(tv);
  report["contraction"] = std::move(contraction);
  report["influence"] = std::move(influence);
  report["beyond_stated_hypothesis"] = std::move(beyond);

  // Empirical relaxation rate against the bound sandwich.
  Rng chain_rng(options.seed + 1);
  const cube::GapEstimate est = cube::empirical_gap_estimate(n, options.steps, chain_rng);
  const double upper = 1.0 / static_cast<double>(n);
  report["empirical"] = Json{{"rho", est.rho}, {"gap_estimate", est.gap_estimate}, {"ci", est.ci},
                             {"fit_lags", est.fit_lags}, {"batches", est.batches},
                             {"effective_samples", est.effective_samples},
                             {"lower_bound", lower}, {"upper_bound", upper}};
  checks.push_back(check_at_least("empirical_gap_above_lower_bound", est.gap_estimate, lower - est.ci));
  checks.push_back(check_at_most("empirical_gap_below_upper_bound", est.gap_estimate, upper + est.ci));

  return finish(std::move(report), checks, start);
}

RunResult merge_reports(const std::vector<nlohmann::json>& reports) {
  const auto start = Clock::now();
  Json merged{{"tool", "spectel"}, {"version", version_string()}, {"command", "report-merge"},
              {"started_at", utc_timestamp()}};
  Json seeds = Json::array();
  std::vector<Check> checks;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const Json& r = reports[k];
    if (!r.is_object() || !r.contains("pass") || !r["pass"].is_boolean())
      throw ParseError("report " + std::to_string(k) + " has no boolean \"pass\" field");
    seeds.push_back(r.value("seed", Json(nullptr)));
    const bool ok = r["pass"].get<bool>();
    checks.push_back(Check{"report[" + std::to_string(k) + "]:" + r.value("command", std::string("unknown")),
                           ok ? 1.0 : 0.0, 1.0, ok, {}});
  }
  merged["seed"] = std::move(seeds);
  merged["reports"] = reports;
  return finish(std::move(merged), checks, start);
}

} // namespace spectel
