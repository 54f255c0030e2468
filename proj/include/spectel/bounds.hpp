#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "spectel/check.hpp"
#include "spectel/target.hpp"

namespace spectel {

struct BoundTolerances {
  double telescope = 1e-9;  // residual floor and bound slack
  double bound = 1e-9;      // lower bounds vs exact gaps
  double lemma = 1e-8;      // 1 - S(m) against G(m)
  double psd = 1e-10;       // smallest Gibbs eigenvalue floor
};

nlohmann::json to_json(const BoundTolerances& tol);

/// Minimum of gap(Lambda, y, l) over supported contexts of one (m, l) cell.
struct GapEntry {
  double gap = 1.0;
  CondContext argmin;
  double min_eigenvalue = 1.0;  // smallest symmetrized eigenvalue seen in the cell
  std::size_t contexts = 0;
};

/// Exact Gap(m, l) table. Keys are (m, l) with 1 <= l <= m <= n.
struct GapProfile {
  std::size_t n = 0;
  std::map<std::pair<std::size_t, std::size_t>, GapEntry> entries;

  bool has(std::size_t m, std::size_t l) const { return entries.count({m, l}) != 0; }
  double gap(std::size_t m, std::size_t l) const;
  double min_eigenvalue() const;
};

/// Computes Gap(m, l) for every l <= l_max (all l when absent) and every m >= l,
/// plus the Gap(m, m-1) column the telescope needs. Ties keep the first
/// context in canonical enumeration order.
GapProfile gap_profile(const FiniteTarget& target, std::optional<std::size_t> l_max = std::nullopt);

struct TelescopeRow {
  std::size_t m = 0;
  std::size_t l = 0;
  double gap = 0.0;    // Gap(m, l)
  double bound = 0.0;  // Gap(m, m-1) * Gap(m-1, l)
  double residual = 0.0;
  bool pass = false;
};

struct ChainRow {
  std::size_t l = 0;
  double gap = 0.0;      // Gap(n, l)
  double product = 0.0;  // prod_{m=l+1}^n Gap(m, m-1)
  double residual = 0.0;
  bool pass = false;
};

struct TelescopeReport {
  std::vector<TelescopeRow> rows;
  std::vector<ChainRow> chain;
  double tolerance = 1e-9;
  bool all_pass = true;
  double min_residual() const;
};

/// Checks Gap(m,l) >= Gap(m,m-1) Gap(m-1,l) for every cell present in the
/// profile, and the chained product for every l. Violations are reported,
/// never thrown.
TelescopeReport telescope_verify(const GapProfile& profile, double tolerance = 1e-9);

/// 1 - gap of the index/value random walk.
double s_of(const FiniteTarget& target, const CondContext& ctx);

/// Summation-based correlation coefficient by direct maximization of
/// E[(sum f_i)^2] / (m sum E[f_i^2]) over per-coordinate mean-zero f.
/// Returns 0 when every conditional marginal is a point mass (no admissible f).
double s_star_oracle(const FiniteTarget& target, const CondContext& ctx);

enum class MetricTag { DiscreteTV, CubeCornerWasserstein };

const char* metric_name(MetricTag tag);

/// Nonnegative, zero-diagonal matrix of pairwise contraction coefficients.
struct InfluenceMatrix {
  Eigen::MatrixXd entries;
  MetricTag metric = MetricTag::DiscreteTV;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
  /// Phi / m.
  Eigen::MatrixXd scaled() const { return entries / static_cast<double>(entries.rows()); }
};

/// Tightest discrete-metric coefficients: phi_ij is the largest total
/// variation between conditional laws of coordinate j across supported
/// values of coordinate i.
InfluenceMatrix influence_matrix_tv(const FiniteTarget& target, const CondContext& ctx);

/// Perron root of a nonnegative square matrix.
double spectral_radius(const Eigen::MatrixXd& matrix);

struct ContextExtremum {
  double value = 0.0;
  CondContext context;
};

struct BoundReport {
  std::size_t n = 0;
  std::size_t l = 0;
  BoundTolerances tolerances;
  GapProfile profile;
  TelescopeReport telescope;
  std::map<std::size_t, ContextExtremum> s_max;    // S(m), correlation route
  std::map<std::size_t, ContextExtremum> g_min;    // G(m), random-walk route
  std::map<std::size_t, ContextExtremum> eta_max;  // eta_m, TV influence
  std::map<std::size_t, double> lemma_residual;    // |1 - S(m) - G(m)|
  double exact_gap = 0.0;
  double corr_bound = 0.0;
  double rw_bound = 0.0;
  std::optional<double> specind_bound;  // empty when some eta_m >= m - 1
  double upper_bound = 0.0;
  std::vector<Check> checks;
  bool all_pass = true;

  nlohmann::json to_json() const;
};

/// Exact profile, correlation / random-walk / spectral-independence bounds on
/// Gap(n, l), the l/n ceiling, and every consistency check between them.
BoundReport assemble_bounds(const FiniteTarget& target, std::size_t l,
                            const BoundTolerances& tol = {});

} // namespace spectel
