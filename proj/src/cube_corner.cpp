#include "spectel/cube_corner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spectel/errors.hpp"

namespace spectel::cube {

namespace {

constexpr double kEigenrelationTolerance = 1e-8;
constexpr double kTvAgreementTolerance = 1e-8;
constexpr double kTvBoundSlack = 1e-10;

constexpr double kFitLow = 0.05;
constexpr double kFitHigh = 0.9;
constexpr std::size_t kMinFitLags = 5;
constexpr std::size_t kMaxLag = 20000;
constexpr std::size_t kBatches = 32;
constexpr std::size_t kBootstrapResamples = 2000;

void require_open(double remaining, double x, const char* what) {
  if (!(x > 0.0 && x < remaining)) throw DomainError(std::string(what) + " must lie in (0, R)");
}

void require_slack(double remaining) {
  if (!(remaining > 0.0 && remaining <= 1.0)) throw DomainError("remaining budget R must lie in (0, 1]");
}

struct DecayFit {
  double rho = 0.0;
  std::size_t lags = 0;
};

// Log-linear fit of the autocorrelation of `series` over lags whose
// autocorrelation lies in (kFitLow, kFitHigh), up to the first lag at or below kFitLow.
DecayFit fit_decay(const double* series, std::size_t count) {
  const double mean = std::accumulate(series, series + count, 0.0) / static_cast<double>(count);
  std::vector<double> centered(count);
  for (std::size_t t = 0; t < count; ++t) centered[t] = series[t] - mean;
  double c0 = 0.0;
  for (double v : centered) c0 += v * v;
  if (!(c0 > 0.0)) throw StatisticalContractError("series has zero variance");

  std::vector<double> xs, ys;
  for (std::size_t k = 1; k < std::min(count, kMaxLag); ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < count; ++t) ck += centered[t] * centered[t + k];
    const double acf = ck / c0;
    if (acf <= kFitLow) break;
    if (acf < kFitHigh) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log(acf));
    }
  }
  if (xs.size() < kMinFitLags) {
    std::ostringstream msg;
    msg << "autocorrelation fit window has " << xs.size() << " lags (need " << kMinFitLags
        << ") over " << count << " samples";
    throw StatisticalContractError(msg.str());
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return DecayFit{std::exp(sxy / sxx), xs.size()};
}

} // namespace

bool CornerState::valid() const {
  double sum = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) return false;
    sum += v;
  }
  return sum < 1.0;
}

double conditional_density(const CondSlack& slack, double x) {
  const double r = slack.remaining;
  if (!(x > 0.0 && x < r)) return 0.0;
  const double m = static_cast<double>(slack.free);
  return m * std::pow(r - x, m - 1.0) / std::pow(r, m);
}

double conditional_cdf(const CondSlack& slack, double x) {
  const double r = slack.remaining;
  if (x <= 0.0) return 0.0;
  if (x >= r) return 1.0;
  return 1.0 - std::pow((r - x) / r, static_cast<double>(slack.free));
}

double sample_conditional(const CondSlack& slack, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("u must lie in (0, 1)");
  if (slack.free == 0) throw DomainError("number of free coordinates must be positive");
  if (slack.free == 1) return slack.remaining * u;
  return slack.remaining * (1.0 - std::pow(1.0 - u, 1.0 / static_cast<double>(slack.free)));
}

double pair_conditional_density(double remaining, std::size_t free, double x, double t) {
  const double left = remaining - x;
  if (!(t > 0.0 && t < left)) return 0.0;
  const double m = static_cast<double>(free);
  return (m - 1.0) * std::pow(left - t, m - 2.0) / std::pow(left, m - 1.0);
}

CornerState stationary_draw(std::size_t n, Rng& rng) {
  if (n < 2) throw DomainError("corner target needs n >= 2");
  CornerState s{std::vector<double>(n)};
  do {
    std::vector<double> e(n + 1);
    for (double& v : e) v = rng.exponential();
    const double total = std::accumulate(e.begin(), e.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) s.x[i] = e[i] / total;
  } while (!s.valid());
  return s;
}

CornerState gibbs_step(const CornerState& state, Rng& rng) {
  CornerState next = state;
  const std::size_t i = rng.index(state.dims());
  double rest = 0.0;
  for (std::size_t j = 0; j < state.dims(); ++j)
    if (j != i) rest += state.x[j];
  const double remaining = 1.0 - rest;
  do {
    next.x[i] = remaining * rng.uniform_open();
  } while (!next.valid());
  return next;
}

double zeta(std::size_t k, std::size_t m) {
  if (k < 1) throw DomainError("zeta needs k >= 1");
  if (m < 2) throw DomainError("zeta needs m >= 2");
  double z = -1.0 / static_cast<double>(m);
  for (std::size_t j = 1; j < k; ++j)
    z *= -static_cast<double>(j + 1) / static_cast<double>(m + j);
  return z;
}

double a_m(std::size_t m) {
  const double md = static_cast<double>(m);
  return std::max(1.0 - zeta(1, m), 1.0 + (md - 1.0) * zeta(2, m));
}

OrthoBasis::OrthoBasis(std::size_t m, double remaining, std::size_t degree)
    : m_(m), remaining_(remaining) {
  if (m < 2) throw DomainError("orthogonal basis needs m >= 2");
  require_slack(remaining);
  if (degree < 1 || degree > kMaxDegree) throw DomainError("basis degree must lie in 1..8");

  const QuadratureRule unit = standard_rule().mapped(0.0L, 1.0L);
  const long double md = static_cast<long double>(m);
  rule_.nodes.resize(unit.size());
  rule_.weights.resize(unit.size());
  for (std::size_t q = 0; q < unit.size(); ++q) {
    rule_.nodes[q] = static_cast<long double>(remaining) * unit.nodes[q];
    rule_.weights[q] = unit.weights[q] * md * std::pow(1.0L - unit.nodes[q], md - 1.0L);
  }

  std::vector<std::vector<long double>> values;
  coeffs_.push_back({1.0L});
  values.emplace_back(unit.size(), 1.0L);
  for (std::size_t d = 1; d <= degree; ++d) {
    std::vector<long double> c(d + 1, 0.0L);
    c[d] = 1.0L;
    std::vector<long double> v(unit.size());
    for (std::size_t q = 0; q < unit.size(); ++q) v[q] = std::pow(unit.nodes[q], static_cast<long double>(d));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < d; ++j) {
        long double proj = 0.0L;
        for (std::size_t q = 0; q < v.size(); ++q) proj += rule_.weights[q] * v[q] * values[j][q];
        for (std::size_t q = 0; q < v.size(); ++q) v[q] -= proj * values[j][q];
        for (std::size_t t = 0; t < coeffs_[j].size(); ++t) c[t] -= proj * coeffs_[j][t];
      }
    }
    long double norm = 0.0L;
    for (std::size_t q = 0; q < v.size(); ++q) norm += rule_.weights[q] * v[q] * v[q];
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    for (auto& x : c) x /= norm;
    values.push_back(std::move(v));
    coeffs_.push_back(std::move(c));
  }
}

long double OrthoBasis::eval(std::size_t k, long double x) const {
  const auto& c = coeffs_.at(k);
  const long double t = x / static_cast<long double>(remaining_);
  long double acc = 0.0L;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

long double OrthoBasis::inner(std::size_t j, std::size_t k) const {
  long double sum = 0.0L;
  for (std::size_t q = 0; q < rule_.size(); ++q) sum += rule_.weights[q] * eval(j, rule_.nodes[q]) * eval(k, rule_.nodes[q]);
  return sum;
}

double verify_eigenrelation(std::size_t m, double remaining, std::size_t max_degree) {
  const OrthoBasis basis(m, remaining, max_degree);
  const long double md = static_cast<long double>(m);
  const long double r = static_cast<long double>(remaining);
  long double worst = 0.0L;
  for (std::size_t k = 1; k <= max_degree; ++k) {
    const long double z = static_cast<long double>(zeta(k, m));
    for (long double x : basis.rule().nodes) {
      const long double left = r - x;
      const QuadratureRule inner = standard_rule().mapped(0.0L, left);
      const long double image = inner.integrate([&](long double t) {
        return basis.eval(k, t) * (md - 1.0L) * std::pow(left - t, md - 2.0L) / std::pow(left, md - 1.0L);
      });
      worst = std::max(worst, std::abs(image - z * basis.eval(k, x)));
    }
  }
  const double residual = static_cast<double>(worst);
  if (residual > kEigenrelationTolerance) {
    throw NumericalContractError("eigenrelation residual " + std::to_string(residual) + " exceeds 1e-8");
  }
  return residual;
}

double prop1_s_bound(std::size_t m) {
  if (m < 2) throw DomainError("bound needs m >= 2");
  if (m == 2) return 0.75;
  const double md = static_cast<double>(m);
  return 1.0 / md + 2.0 * (md - 1.0) / ((md + 1.0) * md * md);
}

CorrLowerBound corr_gap_lower_bound(std::size_t n) {
  if (n < 3) throw DomainError("correlation bound needs n >= 3");
  CorrLowerBound out;
  out.product = 1.0;
  for (std::size_t m = 2; m <= n; ++m) out.product *= 1.0 - prop1_s_bound(m);
  if (n >= 4) out.simplified = 5.0 / (36.0 * static_cast<double>(n - 2));
  return out;
}

double wasserstein_metric(double remaining, double x, double x2) {
  const double hi = std::max(x, x2);
  if (!(hi < remaining)) throw DomainError("metric arguments must lie below R");
  return std::abs(x - x2) / (remaining - hi);
}

std::pair<double, double> coupling_sample(double remaining, std::size_t m, double x, double x2, Rng& rng) {
  if (m < 3) throw DomainError("coupling needs m >= 3");
  require_open(remaining, x, "x");
  require_open(remaining, x2, "x'");
  const double power = 1.0 / static_cast<double>(m - 1);
  for (;;) {
    const double scale = 1.0 - std::pow(1.0 - rng.uniform_open(), power);
    if (scale > 0.0 && scale < 1.0) return {(remaining - x) * scale, (remaining - x2) * scale};
  }
}

InfluenceMatrix wasserstein_influence(std::size_t m) {
  if (m < 3) throw DomainError("coupling influence matrix needs m >= 3");
  const auto size = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Constant(size, size, 1.0 / static_cast<double>(m - 2));
  phi.diagonal().setZero();
  return InfluenceMatrix{phi, MetricTag::CubeCornerWasserstein};
}

InfluenceMatrix discrete_influence(std::size_t m) {
  if (m < 2) throw DomainError("influence matrix needs m >= 2");
  const auto size = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Ones(size, size);
  phi.diagonal().setZero();
  return InfluenceMatrix{phi, MetricTag::DiscreteTV};
}

bool within_coupling_hypothesis(std::size_t m) { return m >= 4; }

TvCheck tv_check(std::size_t m, double remaining, double x, double x2) {
  if (m < 3) throw DomainError("TV check needs m >= 3");
  require_slack(remaining);
  require_open(remaining, x, "x");
  require_open(remaining, x2, "x'");
  TvCheck out;
  if (x == x2) return out;

  const long double r = remaining;
  const long double lo = std::min(x, x2);
  const long double hi = std::max(x, x2);
  const long double a = r - lo;  // wider support
  const long double b = r - hi;
  const long double md = static_cast<long double>(m);
  auto density = [&](long double left, long double t) {
    if (t >= left) return 0.0L;
    return (md - 1.0L) * std::pow(left - t, md - 2.0L) / std::pow(left, md - 1.0L);
  };
  auto diff = [&](long double t) { return density(b, t) - density(a, t); };

  // The narrower law starts higher and vanishes at b, so the densities cross once in (0, b).
  long double left = 0.0L, right = b;
  for (int it = 0; it < 200 && right - left > 0.0L; ++it) {
    const long double mid = 0.5L * (left + right);
    if (mid == left || mid == right) break;
    (diff(mid) > 0.0L ? left : right) = mid;
  }
  const long double cross = 0.5L * (left + right);

  const auto& unit = standard_rule();
  const long double above = unit.mapped(0.0L, cross).integrate(diff);
  const long double below = -unit.mapped(cross, b).integrate(diff) +
                            unit.mapped(b, a).integrate([&](long double t) { return density(a, t); });
  out.tv_quadrature = static_cast<double>(0.5L * (above + below));

  const long double e = (md - 1.0L) / (md - 2.0L);
  out.tv_formula = static_cast<double>(std::pow(hi - lo, md - 1.0L) /
                                       std::pow(std::abs(std::pow(a, e) - std::pow(b, e)), md - 2.0L));
  out.bound = std::pow((static_cast<double>(m) - 2.0) / (static_cast<double>(m) - 1.0), static_cast<double>(m) - 2.0) *
              wasserstein_metric(remaining, x, x2);

  if (std::abs(out.tv_quadrature - out.tv_formula) > kTvAgreementTolerance) {
    throw NumericalContractError("TV quadrature " + std::to_string(out.tv_quadrature) +
                                 " disagrees with closed form " + std::to_string(out.tv_formula));
  }
  if (out.tv_quadrature > out.bound + kTvBoundSlack) {
    throw NumericalContractError("TV " + std::to_string(out.tv_quadrature) + " exceeds bound " +
                                 std::to_string(out.bound));
  }
  return out;
}

ContractionEstimate contraction_ratio(std::size_t m, double remaining, double x, double x2,
                                      std::size_t draws, Rng& rng) {
  if (draws < 2) throw DomainError("contraction estimate needs at least two draws");
  if (x == x2) throw DomainError("contraction ratio needs distinct points");
  const double d_in = wasserstein_metric(remaining, x, x2);
  ContractionEstimate est;
  est.bound = 1.0 / static_cast<double>(m - 2);
  est.draws = draws;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const auto [o1, o2] = coupling_sample(remaining, m, x, x2, rng);
    const double ratio = wasserstein_metric(remaining, o1, o2) / d_in;
    const double delta = ratio - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (ratio - mean);
  }
  est.mean_ratio = mean;
  est.standard_error = std::sqrt(m2 / static_cast<double>(draws - 1) / static_cast<double>(draws));
  return est;
}

GapEstimate empirical_gap_estimate(std::size_t n, std::size_t steps, Rng& rng) {
  if (n < 3 || n > 8) throw DomainError("empirical gap estimate needs 3 <= n <= 8");
  if (steps < kMinEstimateSteps) {
    throw StatisticalContractError("insufficient samples: " + std::to_string(steps) +
                                   " steps requested, at least " + std::to_string(kMinEstimateSteps) +
                                   " required");
  }
  std::vector<double> trace(steps);
  CornerState state = stationary_draw(n, rng);
  for (std::size_t t = 0; t < steps; ++t) {
    state = gibbs_step(state, rng);
    trace[t] = state.x[0];
  }

  GapEstimate est;
  est.n = n;
  est.steps = steps;
  const DecayFit full = fit_decay(trace.data(), steps);
  est.rho = full.rho;
  est.gap_estimate = 1.0 - full.rho;
  est.fit_lags = full.lags;
  est.effective_samples = static_cast<double>(steps) * (1.0 - full.rho) / (1.0 + full.rho);

  const std::size_t batch = steps / kBatches;
  std::vector<double> batch_gaps;
  for (std::size_t b = 0; b < kBatches; ++b) batch_gaps.push_back(1.0 - fit_decay(trace.data() + b * batch, batch).rho);
  est.batches = kBatches;

  std::vector<double> means(kBootstrapResamples);
  for (double& mval : means) {
    double sum = 0.0;
    for (std::size_t k = 0; k < kBatches; ++k) sum += batch_gaps[rng.index(kBatches)];
    mval = sum / static_cast<double>(kBatches);
  }
  const double mu = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
  double var = 0.0;
  for (double v : means) var += (v - mu) * (v - mu);
  var /= static_cast<double>(means.size() - 1);
  est.ci = 1.96 * std::sqrt(var);
  return est;
}

} // namespace spectel::cube
