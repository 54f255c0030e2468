#include "spectel/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "spectel/errors.hpp"
#include "spectel/kernels.hpp"
#include "spectel/parallel.hpp"

namespace spectel {

namespace {

std::string cell_key(std::size_t m, std::size_t l) {
  return std::to_string(m) + "," + std::to_string(l);
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return 0.5 * sum;
}

// Orthonormal basis (columns) of the p-weighted mean-zero functions on the
// support of p, expressed as values over the whole alphabet.
Eigen::MatrixXd mean_zero_basis(const std::vector<double>& p) {
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < p.size(); ++x)
    if (p[x] > 0.0) support.push_back(x);
  const auto d = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.size()), d - 1);
  if (d <= 1) return basis;

  Eigen::VectorXd root(d);
  for (Eigen::Index k = 0; k < d; ++k) root[k] = std::sqrt(p[support[static_cast<std::size_t>(k)]]);
  root.normalize();
  // Columns 1.. of a full Q from QR of root span its orthogonal complement.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(root);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const std::size_t x = support[static_cast<std::size_t>(k)];
    for (Eigen::Index c = 1; c < d; ++c)
      basis(static_cast<Eigen::Index>(x), c - 1) = q(k, c) / std::sqrt(p[x]);
  }
  return basis;
}

void require_walk_context(const FiniteTarget& target, const CondContext& ctx) {
  validate_context(target, ctx);
  if (!is_supported(target, ctx)) throw DomainError("context has zero marginal mass");
  if (target.dims() - ctx.size() < 2) throw DomainError("need at least two free coordinates");
}

} // namespace

nlohmann::json to_json(const BoundTolerances& tol) {
  return {{"telescope", tol.telescope}, {"bound", tol.bound}, {"lemma", tol.lemma}, {"psd", tol.psd}};
}

double GapProfile::gap(std::size_t m, std::size_t l) const {
  auto it = entries.find({m, l});
  if (it == entries.end()) throw DomainError("profile has no entry for (" + cell_key(m, l) + ")");
  return it->second.gap;
}

double GapProfile::min_eigenvalue() const {
  double lo = 1.0;
  for (const auto& [key, e] : entries) lo = std::min(lo, e.min_eigenvalue);
  return lo;
}

GapProfile gap_profile(const FiniteTarget& target, std::optional<std::size_t> l_max) {
  const std::size_t n = target.dims();
  const std::size_t cap = l_max.value_or(n);
  if (cap < 1) throw DomainError("l_max must be at least 1");
  if (target.num_states() > kMaxKernelStates) {
    throw ResourceError("state space of " + std::to_string(target.num_states()) + " states exceeds the cap of " +
                        std::to_string(kMaxKernelStates));
  }

  GapProfile profile;
  profile.n = n;
  for (std::size_t m = 1; m <= n; ++m) {
    std::vector<std::size_t> blocks;
    for (std::size_t l = 1; l <= std::min(m, cap); ++l) blocks.push_back(l);
    if (m >= 2 && m - 1 > std::min(m, cap)) blocks.push_back(m - 1);

    const auto contexts = supported_contexts(target, n - m);
    const std::size_t jobs = contexts.size() * blocks.size();
    std::vector<SpectralSummary> results(jobs);
    parallel_for(jobs, [&](std::size_t job) {
      const auto& ctx = contexts[job / blocks.size()];
      const std::size_t l = blocks[job % blocks.size()];
      results[job] = spectral_summary(gibbs_kernel(target, ctx, l));
    });

    for (std::size_t b = 0; b < blocks.size(); ++b) {
      GapEntry entry;
      entry.gap = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < contexts.size(); ++c) {
        const auto& r = results[c * blocks.size() + b];
        if (r.gap < entry.gap) {
          entry.gap = r.gap;
          entry.argmin = contexts[c];
        }
        entry.min_eigenvalue = std::min(entry.min_eigenvalue, r.min_eigenvalue);
      }
      entry.contexts = contexts.size();
      profile.entries[{m, blocks[b]}] = std::move(entry);
    }
  }
  return profile;
}

double TelescopeReport::min_residual() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) lo = std::min(lo, r.residual);
  for (const auto& c : chain) lo = std::min(lo, c.residual);
  return lo;
}

TelescopeReport telescope_verify(const GapProfile& profile, double tolerance) {
  TelescopeReport report;
  report.tolerance = tolerance;
  const std::size_t n = profile.n;
  for (std::size_t l = 1; l + 1 <= n; ++l) {
    for (std::size_t m = l + 1; m <= n; ++m) {
      if (!profile.has(m, l) || !profile.has(m, m - 1) || !profile.has(m - 1, l)) continue;
      TelescopeRow row{m, l, profile.gap(m, l), profile.gap(m, m - 1) * profile.gap(m - 1, l)};
      row.residual = row.gap - row.bound;
      row.pass = row.residual >= -tolerance;
      report.all_pass = report.all_pass && row.pass;
      report.rows.push_back(row);
    }
    if (!profile.has(n, l)) continue;
    ChainRow chain{l, profile.gap(n, l), 1.0};
    bool complete = true;
    for (std::size_t m = l + 1; m <= n; ++m) {
      if (!profile.has(m, m - 1)) {
        complete = false;
        break;
      }
      chain.product *= profile.gap(m, m - 1);
    }
    if (!complete) continue;
    chain.residual = chain.gap - chain.product;
    chain.pass = chain.residual >= -tolerance;
    report.all_pass = report.all_pass && chain.pass;
    report.chain.push_back(chain);
  }
  return report;
}

double s_of(const FiniteTarget& target, const CondContext& ctx) {
  return 1.0 - spectral_summary(random_walk_kernel(target, ctx)).gap;
}

double s_star_oracle(const FiniteTarget& target, const CondContext& ctx) {
  require_walk_context(target, ctx);
  const IndexSet free = complement(target.dims(), ctx.lambda);
  const std::size_t m = free.size();

  std::vector<std::vector<double>> marg(m);
  std::vector<Eigen::MatrixXd> bases(m);
  std::vector<Eigen::Index> row_offset(m + 1, 0), col_offset(m + 1, 0);
  for (std::size_t a = 0; a < m; ++a) {
    marg[a] = conditional(target, {free[a]}, ctx).values;
    bases[a] = mean_zero_basis(marg[a]);
    row_offset[a + 1] = row_offset[a] + bases[a].rows();
    col_offset[a + 1] = col_offset[a] + bases[a].cols();
  }
  const Eigen::Index dim = col_offset[m];
  if (dim == 0) return 0.0;

  // Second-moment matrix A[(i,x),(j,x')] = P(Y_i = x, Y_j = x').
  Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(row_offset[m], row_offset[m]);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t x = 0; x < marg[a].size(); ++x)
      moments(row_offset[a] + static_cast<Eigen::Index>(x), row_offset[a] + static_cast<Eigen::Index>(x)) =
          marg[a][x];
    for (std::size_t b = a + 1; b < m; ++b) {
      const Tensor joint = conditional(target, {free[a], free[b]}, ctx);
      const std::size_t size_b = joint.axes[1];
      for (std::size_t x = 0; x < joint.axes[0]; ++x) {
        for (std::size_t x2 = 0; x2 < size_b; ++x2) {
          const double p = joint.values[x * size_b + x2];
          const auto r = row_offset[a] + static_cast<Eigen::Index>(x);
          const auto c = row_offset[b] + static_cast<Eigen::Index>(x2);
          moments(r, c) = p;
          moments(c, r) = p;
        }
      }
    }
  }

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(row_offset[m], dim);
  for (std::size_t a = 0; a < m; ++a)
    basis.block(row_offset[a], col_offset[a], bases[a].rows(), bases[a].cols()) = bases[a];

  // In these coordinates the denominator sum_i E[f_i^2] is the identity.
  Eigen::MatrixXd reduced = basis.transpose() * moments * basis;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalContractError("eigenvalue solver failed");
  return solver.eigenvalues()[dim - 1] / static_cast<double>(m);
}

const char* metric_name(MetricTag tag) {
  switch (tag) {
  case MetricTag::DiscreteTV: return "discrete-tv";
  case MetricTag::CubeCornerWasserstein: return "cube-corner-wasserstein";
  }
  return "unknown";
}

InfluenceMatrix influence_matrix_tv(const FiniteTarget& target, const CondContext& ctx) {
  require_walk_context(target, ctx);
  const IndexSet free = complement(target.dims(), ctx.lambda);
  const auto m = static_cast<Eigen::Index>(free.size());
  InfluenceMatrix phi{Eigen::MatrixXd::Zero(m, m), MetricTag::DiscreteTV};

  for (Eigen::Index a = 0; a < m; ++a) {
    const std::size_t ci = free[static_cast<std::size_t>(a)];
    const auto marg = conditional(target, {ci}, ctx).values;
    std::vector<std::size_t> support;
    for (std::size_t x = 0; x < marg.size(); ++x)
      if (marg[x] > 0.0) support.push_back(x);
    for (Eigen::Index b = 0; b < m; ++b) {
      if (a == b) continue;
      const std::size_t cj = free[static_cast<std::size_t>(b)];
      std::vector<std::vector<double>> rows;
      for (auto x : support) rows.push_back(conditional(target, {cj}, extend_context(ctx, ci, x)).values);
      double worst = 0.0;
      for (std::size_t u = 0; u < rows.size(); ++u)
        for (std::size_t v = u + 1; v < rows.size(); ++v) worst = std::max(worst, total_variation(rows[u], rows[v]));
      phi.entries(a, b) = worst;
    }
  }
  return phi;
}

double spectral_radius(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw DomainError("spectral radius needs a square matrix");
  if (matrix.size() == 0) return 0.0;
  if ((matrix.array() < 0.0).any()) throw DomainError("influence matrix has a negative entry");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, false);
  if (solver.info() != Eigen::Success) throw NumericalContractError("eigenvalue solver failed");
  const double radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  // Perron root bracket: it lies between the smallest and largest line sums.
  const double lo = std::max(matrix.rowwise().sum().minCoeff(), matrix.colwise().sum().minCoeff());
  const double hi = std::min(matrix.rowwise().sum().maxCoeff(), matrix.colwise().sum().maxCoeff());
  return std::clamp(radius, lo, hi);
}

BoundReport assemble_bounds(const FiniteTarget& target, std::size_t l, const BoundTolerances& tol) {
  const std::size_t n = target.dims();
  if (l < 1 || l + 1 > n) throw DomainError("block size must lie in 1..n-1");

  BoundReport report;
  report.n = n;
  report.l = l;
  report.tolerances = tol;
  report.profile = gap_profile(target);
  report.telescope = telescope_verify(report.profile, tol.telescope);
  report.exact_gap = report.profile.gap(n, l);
  report.upper_bound = static_cast<double>(l) / static_cast<double>(n);

  double s_floor_violation = 0.0;
  for (std::size_t m = 2; m <= n; ++m) {
    const auto contexts = supported_contexts(target, n - m);
    struct PerContext {
      double s = 0.0;
      double g = 0.0;
      double eta = 0.0;
    };
    std::vector<PerContext> results(contexts.size());
    parallel_for(contexts.size(), [&](std::size_t c) {
      results[c].s = s_star_oracle(target, contexts[c]);
      results[c].g = spectral_summary(random_walk_kernel(target, contexts[c])).gap;
      results[c].eta = spectral_radius(influence_matrix_tv(target, contexts[c]).entries);
    });

    ContextExtremum s_max{-std::numeric_limits<double>::infinity(), {}};
    ContextExtremum g_min{std::numeric_limits<double>::infinity(), {}};
    ContextExtremum eta_max{-std::numeric_limits<double>::infinity(), {}};
    const double floor = 1.0 / static_cast<double>(m);
    for (std::size_t c = 0; c < contexts.size(); ++c) {
      const auto& r = results[c];
      if (r.s > s_max.value) s_max = {r.s, contexts[c]};
      if (r.g < g_min.value) g_min = {r.g, contexts[c]};
      if (r.eta > eta_max.value) eta_max = {r.eta, contexts[c]};
      // Degenerate contexts (all marginals point masses) have no admissible f.
      if (r.s > 0.0) {
        s_floor_violation = std::max(s_floor_violation, floor - r.s);
        s_floor_violation = std::max(s_floor_violation, r.s - 1.0);
      }
    }
    report.s_max[m] = s_max;
    report.g_min[m] = g_min;
    report.eta_max[m] = eta_max;
    report.lemma_residual[m] = std::abs((1.0 - s_max.value) - g_min.value);
  }

  report.corr_bound = 1.0;
  report.rw_bound = 1.0;
  double specind = 1.0;
  bool specind_ok = true;
  for (std::size_t m = l + 1; m <= n; ++m) {
    const double md = static_cast<double>(m);
    report.corr_bound *= 1.0 - report.s_max[m].value;
    report.rw_bound *= report.g_min[m].value;
    const double eta = report.eta_max[m].value;
    if (eta < md - 1.0) {
      specind *= (md - 1.0) / md - eta / md;
    } else {
      specind_ok = false;
    }
  }
  if (specind_ok) report.specind_bound = specind;

  auto& checks = report.checks;
  checks.push_back(check_at_least("telescope_min_residual", report.telescope.min_residual(), -tol.telescope));
  checks.push_back(check_at_least("gibbs_psd_min_eigenvalue", report.profile.min_eigenvalue(), -tol.psd));
  checks.push_back(check_at_most("s_range_violation", s_floor_violation, 1e-10));
  for (std::size_t m = 2; m <= n; ++m) {
    const std::string tag = "(m=" + std::to_string(m) + ")";
    const double local = report.profile.gap(m, m - 1);
    checks.push_back(check_at_most("lemma_residual" + tag, report.lemma_residual[m], tol.lemma));
    checks.push_back(check_at_most("corr_local" + tag, 1.0 - report.s_max[m].value, local + tol.bound));
    checks.push_back(check_at_most("rw_local" + tag, report.g_min[m].value, local + tol.bound));
    const double md = static_cast<double>(m);
    const double eta = report.eta_max[m].value;
    if (eta < md - 1.0)
      checks.push_back(check_at_most("specind_local" + tag, (md - 1.0) / md - eta / md, local + tol.bound));
  }
  checks.push_back(check_at_most("corr_bound", report.corr_bound, report.exact_gap + tol.bound));
  checks.push_back(check_at_most("rw_bound", report.rw_bound, report.exact_gap + tol.bound));
  if (report.specind_bound)
    checks.push_back(check_at_most("specind_bound", *report.specind_bound, report.exact_gap + tol.bound));
  checks.push_back(check_at_most("upper_bound", report.exact_gap, report.upper_bound + tol.bound));

  report.all_pass = report.telescope.all_pass;
  for (const auto& c : checks) report.all_pass = report.all_pass && c.pass;
  return report;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json gap = nlohmann::json::object();
  nlohmann::json argmin = nlohmann::json::object();
  for (const auto& [key, e] : profile.entries) {
    gap[cell_key(key.first, key.second)] = e.gap;
    argmin[cell_key(key.first, key.second)] = context_to_json(e.argmin);
  }
  nlohmann::json residuals = nlohmann::json::object();
  for (const auto& r : telescope.rows) residuals[cell_key(r.m, r.l)] = r.residual;
  nlohmann::json chain = nlohmann::json::array();
  for (const auto& c : telescope.chain)
    chain.push_back({{"l", c.l}, {"gap", c.gap}, {"product", c.product}, {"residual", c.residual}, {"pass", c.pass}});

  auto column = [](const std::map<std::size_t, ContextExtremum>& col) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [m, e] : col) j[std::to_string(m)] = e.value;
    return j;
  };
  nlohmann::json lemma = nlohmann::json::object();
  for (const auto& [m, r] : lemma_residual) lemma[std::to_string(m)] = r;

  nlohmann::json bounds{{"corr", corr_bound}, {"rw", rw_bound}, {"upper", upper_bound}, {"exact", exact_gap}};
  if (specind_bound) {
    bounds["specind"] = *specind_bound;
  } else {
    bounds["specind"] = "inapplicable";
  }

  nlohmann::json check_list = nlohmann::json::array();
  for (const auto& c : checks) check_list.push_back(spectel::to_json(c));

  return {{"n", n},
          {"l", l},
          {"gap", gap},
          {"S", column(s_max)},
          {"G", column(g_min)},
          {"eta", column(eta_max)},
          {"bounds", bounds},
          {"residuals", residuals},
          {"chain", chain},
          {"lemma_residual", lemma},
          {"argmin", argmin},
          {"tolerances", spectel::to_json(tolerances)},
          {"checks", check_list},
          {"pass", all_pass}};
}

} // namespace spectel
