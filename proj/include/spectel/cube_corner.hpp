#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "spectel/bounds.hpp"
#include "spectel/quadrature.hpp"
#include "spectel/rng.hpp"

// Uniform distribution on {x in (0,1)^n : sum x_i < 1} and its single-site
// Gibbs sampler.
namespace spectel::cube {

/// A point strictly inside the corner: every x_i > 0 and sum x_i < 1.
struct CornerState {
  std::vector<double> x;

  std::size_t dims() const noexcept { return x.size(); }
  bool valid() const;
};

/// Conditioning data of one free coordinate: the remaining budget R and the
/// number m of free coordinates. m = 1 is the full conditional (uniform on (0, R)).
struct CondSlack {
  double remaining = 1.0;
  std::size_t free = 2;
};

/// m (R - x)^{m-1} / R^m on (0, R), zero elsewhere.
double conditional_density(const CondSlack& slack, double x);
/// 1 - ((R - x) / R)^m on (0, R).
double conditional_cdf(const CondSlack& slack, double x);
/// Inverse-CDF draw R (1 - (1 - u)^{1/m}) for u in (0, 1).
double sample_conditional(const CondSlack& slack, double u);

/// Density of coordinate j given coordinate i at x: (m-1)(R-x-t)^{m-2} / (R-x)^{m-1}.
double pair_conditional_density(double remaining, std::size_t free, double x, double t);

/// Exact draw from the target (Dirichlet(1, ..., 1) with the slack dropped).
CornerState stationary_draw(std::size_t n, Rng& rng);

/// One random-scan step: a uniform coordinate is redrawn uniformly on its
/// open slack interval. Boundary draws are rejected and redrawn.
CornerState gibbs_step(const CornerState& state, Rng& rng);

/// (-1)^k k! (m-1)! / (m+k-1)!, by the ratio recursion.
double zeta(std::size_t k, std::size_t m);

/// max{1 - zeta_1, 1 + (m-1) zeta_2}.
double a_m(std::size_t m);

/// Orthonormal polynomials p_1..p_K of the conditional density, built by
/// modified Gram-Schmidt on monomials of t = x / R in quadrature arithmetic.
class OrthoBasis {
public:
  static constexpr std::size_t kMaxDegree = 8;

  OrthoBasis(std::size_t m, double remaining, std::size_t degree);

  std::size_t m() const noexcept { return m_; }
  double remaining() const noexcept { return remaining_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  /// Quadrature rule for the density on (0, R); weights include the density.
  const QuadratureRule& rule() const noexcept { return rule_; }

  /// p_k(x); k = 0 is the constant one.
  long double eval(std::size_t k, long double x) const;
  /// <p_j, p_k> under the conditional density.
  long double inner(std::size_t j, std::size_t k) const;
  /// Monomial coefficients of p_k in t = x / R, lowest first.
  const std::vector<long double>& coefficients(std::size_t k) const { return coeffs_.at(k); }

private:
  std::size_t m_;
  double remaining_;
  QuadratureRule rule_;
  std::vector<std::vector<long double>> coeffs_;
};

/// Max over outer quadrature nodes and k <= K of |(P p_k)(x) - zeta_k p_k(x)|.
/// Throws NumericalContractError above 1e-8.
double verify_eigenrelation(std::size_t m, double remaining, std::size_t max_degree);

/// Upper bound on s(Lambda, x_Lambda) with m free coordinates.
double prop1_s_bound(std::size_t m);

struct CorrLowerBound {
  double product = 0.0;               // (1/4) prod_{m=3}^n (1 - prop1_s_bound(m))
  std::optional<double> simplified;   // 5 / (36 (n - 2)), n >= 4
};

CorrLowerBound corr_gap_lower_bound(std::size_t n);

/// |x - x'| / (R - max(x, x')).
double wasserstein_metric(double remaining, double x, double x2);

/// One draw of the scaling coupling ((R-x) X, (R-x') X), X ~ (m-1)(1-t)^{m-2}.
std::pair<double, double> coupling_sample(double remaining, std::size_t m, double x, double x2, Rng& rng);

/// Zero diagonal, off-diagonal 1/(m-2). Defined for m >= 3; the coupling
/// argument is only stated for m >= 4 (see within_coupling_hypothesis).
InfluenceMatrix wasserstein_influence(std::size_t m);
/// Discrete-metric counterpart: every off-diagonal entry is 1.
InfluenceMatrix discrete_influence(std::size_t m);
bool within_coupling_hypothesis(std::size_t m);

struct TvCheck {
  double tv_quadrature = 0.0;
  double tv_formula = 0.0;
  double bound = 0.0;  // ((m-2)/(m-1))^{m-2} d(x, x')
};

/// Throws NumericalContractError if quadrature and closed form disagree by
/// more than 1e-8 or the bound is exceeded by more than 1e-10.
TvCheck tv_check(std::size_t m, double remaining, double x, double x2);

struct ContractionEstimate {
  double mean_ratio = 0.0;  // E[d_out] / d_in
  double standard_error = 0.0;
  double bound = 0.0;       // 1 / (m - 2)
  std::size_t draws = 0;
  bool pass() const { return mean_ratio <= bound + 3.0 * standard_error; }
};

ContractionEstimate contraction_ratio(std::size_t m, double remaining, double x, double x2,
                                      std::size_t draws, Rng& rng);

struct GapEstimate {
  std::size_t n = 0;
  std::size_t steps = 0;
  double rho = 0.0;            // fitted autocorrelation decay rate of x_1
  double gap_estimate = 0.0;   // 1 - rho
  double ci = 0.0;             // bootstrap half-width (95%)
  std::size_t fit_lags = 0;
  std::size_t batches = 0;
  double effective_samples = 0.0;
};

/// Relaxation-rate estimate from a stationary run of the corner Gibbs chain.
/// Requires 3 <= n <= 8 and at least 1e6 steps.
GapEstimate empirical_gap_estimate(std::size_t n, std::size_t steps, Rng& rng);

inline constexpr std::size_t kMinEstimateSteps = 1000000;

} // namespace spectel::cube
