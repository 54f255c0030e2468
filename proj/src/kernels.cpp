#include "spectel/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "spectel/errors.hpp"

namespace spectel {

namespace {

constexpr double kBalanceTolerance = 1e-10;

void check_state_cap(std::size_t states) {
  if (states > kMaxKernelStates) {
    throw ResourceError("state space of " + std::to_string(states) + " states exceeds the cap of " +
                        std::to_string(kMaxKernelStates));
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

void require_supported(const FiniteTarget& target, const CondContext& ctx) {
  if (!is_supported(target, ctx)) throw DomainError("context has zero marginal mass");
}

// pi(y, z) over free states, normalized; uniform when the context carries no mass.
Eigen::VectorXd free_conditional(const FiniteTarget& target, const FreeSpace& space) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(space.num_states()));
  for (std::size_t s = 0; s < space.num_states(); ++s)
    w[static_cast<Eigen::Index>(s)] = target.probs()[space.full_index(s)];
  const double mass = w.sum();
  if (mass > 0.0) return w / mass;
  return Eigen::VectorXd::Constant(w.size(), 1.0 / static_cast<double>(w.size()));
}

Eigen::MatrixXd recursive_matrix(const FiniteTarget& target, const CondContext& ctx, std::size_t l) {
  const FreeSpace space(target, ctx);
  const auto states = static_cast<Eigen::Index>(space.num_states());
  const std::size_t m = space.num_free();

  if (m == l) {
    const Eigen::VectorXd row = free_conditional(target, space);
    return row.transpose().replicate(states, 1);
  }

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(states, states);
  const double share = 1.0 / static_cast<double>(m);
  for (std::size_t pos = 0; pos < m; ++pos) {
    const std::size_t coord = space.coords()[pos];
    const std::size_t stride = space.stride(pos);
    const std::size_t block = stride * space.extent(pos);
    for (std::size_t v = 0; v < space.extent(pos); ++v) {
      const Eigen::MatrixXd sub = recursive_matrix(target, extend_context(ctx, coord, v), l);
      // Free states with coordinate `coord` at v, indexed by their reduced state.
      std::vector<Eigen::Index> embed(static_cast<std::size_t>(sub.rows()));
      for (std::size_t r = 0; r < embed.size(); ++r) {
        const std::size_t high = r / stride;
        const std::size_t low = r % stride;
        embed[r] = static_cast<Eigen::Index>(high * block + v * stride + low);
      }
      for (std::size_t a = 0; a < embed.size(); ++a) {
        for (std::size_t b = 0; b < embed.size(); ++b) {
          k(embed[a], embed[b]) += share * sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
    }
  }
  return k;
}

WeightedKernel walk_kernel(const FiniteTarget& target, const CondContext& ctx, bool altered) {
  require_supported(target, ctx);
  const IndexSet free = complement(target.dims(), ctx.lambda);
  const std::size_t m = free.size();
  if (m < 2) throw DomainError("random walk needs at least two free coordinates");

  std::vector<std::size_t> offset(m + 1, 0);
  for (std::size_t a = 0; a < m; ++a) offset[a + 1] = offset[a] + target.axis(free[a]);
  const auto states = static_cast<Eigen::Index>(offset[m]);
  check_state_cap(offset[m]);

  std::vector<std::vector<double>> marg(m);
  for (std::size_t a = 0; a < m; ++a) marg[a] = conditional(target, {free[a]}, ctx).values;

  WeightedKernel kernel{Eigen::MatrixXd::Zero(states, states), Eigen::VectorXd(states)};
  const double share = 1.0 / static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t size_a = target.axis(free[a]);
    for (std::size_t x = 0; x < size_a; ++x) {
      const auto row = static_cast<Eigen::Index>(offset[a] + x);
      kernel.weights[row] = marg[a][x] * share;
      if (altered) {
        for (std::size_t x2 = 0; x2 < size_a; ++x2)
          kernel.matrix(row, static_cast<Eigen::Index>(offset[a] + x2)) += share * marg[a][x2];
      } else {
        kernel.matrix(row, row) += share;
      }
    }
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      const std::size_t size_b = target.axis(free[b]);
      // Conditional of coordinate b given coordinate a at x (and y).
      for (std::size_t x = 0; x < size_a; ++x) {
        const Tensor cond = conditional(target, {free[b]}, extend_context(ctx, free[a], x));
        const auto row = static_cast<Eigen::Index>(offset[a] + x);
        for (std::size_t x2 = 0; x2 < size_b; ++x2)
          kernel.matrix(row, static_cast<Eigen::Index>(offset[b] + x2)) += share * cond.values[x2];
      }
    }
  }
  return kernel;
}

} // namespace

KernelDiagnostics diagnose(const WeightedKernel& kernel) {
  KernelDiagnostics d;
  const auto& k = kernel.matrix;
  const auto& w = kernel.weights;
  d.row_sum_error = (k.rowwise().sum().array() - 1.0).abs().maxCoeff();
  d.weight_sum_error = std::abs(w.sum() - 1.0);
  d.stationarity_error = (w.transpose() * k - w.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd flow = w.asDiagonal() * k;
  d.balance_error = (flow - flow.transpose()).cwiseAbs().maxCoeff();
  return d;
}

WeightedKernel gibbs_kernel(const FiniteTarget& target, const CondContext& ctx, std::size_t l) {
  require_supported(target, ctx);
  const std::size_t m = target.dims() - ctx.size();
  if (l < 1 || l > m) throw DomainError("block size must lie in 1..n-|Lambda|");

  const FreeSpace space(target, ctx);
  check_state_cap(space.num_states());
  const auto states = static_cast<Eigen::Index>(space.num_states());

  WeightedKernel kernel{Eigen::MatrixXd::Zero(states, states), free_conditional(target, space)};
  IndexSet positions(m);
  for (std::size_t k = 0; k < m; ++k) positions[k] = k;
  const double share = 1.0 / binomial(m, l);

  std::vector<double> cond;
  std::vector<std::size_t> members;
  for (const auto& block : subsets_of_size(positions, l)) {
    // Offsets of every assignment of the block, row-major over the block.
    std::vector<std::size_t> offsets{0};
    for (auto pos : block) {
      std::vector<std::size_t> next;
      for (auto o : offsets)
        for (std::size_t v = 0; v < space.extent(pos); ++v) next.push_back(o + v * space.stride(pos));
      offsets = std::move(next);
    }
    for (std::size_t key = 0; key < space.num_states(); ++key) {
      bool is_key = true;
      for (auto pos : block) is_key = is_key && space.digit(key, pos) == 0;
      if (!is_key) continue;

      members.clear();
      cond.clear();
      double mass = 0.0;
      for (auto o : offsets) {
        members.push_back(key + o);
        cond.push_back(target.probs()[space.full_index(key + o)]);
        mass += cond.back();
      }
      for (double& c : cond) c = mass > 0.0 ? c / mass : 1.0 / static_cast<double>(cond.size());
      for (auto src : members) {
        for (std::size_t t = 0; t < members.size(); ++t) {
          kernel.matrix(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(members[t])) +=
              share * cond[t];
        }
      }
    }
  }
  return kernel;
}

WeightedKernel recursive_gibbs_kernel(const FiniteTarget& target, const CondContext& ctx,
                                      std::size_t l) {
  require_supported(target, ctx);
  const std::size_t m = target.dims() - ctx.size();
  if (l < 1 || l > m) throw DomainError("block size must lie in 1..n-|Lambda|");
  const FreeSpace space(target, ctx);
  check_state_cap(space.num_states());
  return WeightedKernel{recursive_matrix(target, ctx, l), free_conditional(target, space)};
}

WeightedKernel random_walk_kernel(const FiniteTarget& target, const CondContext& ctx) {
  return walk_kernel(target, ctx, false);
}

WeightedKernel altered_random_walk_kernel(const FiniteTarget& target, const CondContext& ctx) {
  return walk_kernel(target, ctx, true);
}

std::vector<IndexedStatePoint> indexed_points(const FiniteTarget& target, const CondContext& ctx) {
  validate_context(target, ctx);
  std::vector<IndexedStatePoint> out;
  for (auto c : complement(target.dims(), ctx.lambda))
    for (std::size_t x = 0; x < target.axis(c); ++x) out.push_back({c, x});
  return out;
}

SpectralSummary spectral_summary(const WeightedKernel& kernel) {
  const auto n = kernel.matrix.rows();
  if (kernel.matrix.cols() != n || kernel.weights.size() != n)
    throw DomainError("kernel matrix and weights disagree in size");
  const KernelDiagnostics diag = diagnose(kernel);
  if (diag.balance_error > kBalanceTolerance) {
    throw NumericalContractError("kernel violates detailed balance by " +
                                 std::to_string(diag.balance_error));
  }

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (kernel.weights[i] > 0.0) keep.push_back(i);
  const auto size = static_cast<Eigen::Index>(keep.size());
  if (size == 0) throw DomainError("kernel weights carry no mass");

  Eigen::VectorXd root(size);
  for (Eigen::Index a = 0; a < size; ++a) root[a] = std::sqrt(kernel.weights[keep[a]]);
  root /= root.norm();

  Eigen::MatrixXd sym(size, size);
  for (Eigen::Index a = 0; a < size; ++a)
    for (Eigen::Index b = 0; b < size; ++b)
      sym(a, b) = root[a] * kernel.matrix(keep[a], keep[b]) / root[b];
  sym = 0.5 * (sym + sym.transpose());

  // Lifting the constant direction from eigenvalue 1 to 2 isolates it as the
  // unique top eigenvalue; the rest of the spectrum acts on L2_0.
  sym += root * root.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalContractError("eigenvalue solver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();

  SpectralSummary out;
  if (size == 1) return out;
  const double lo = ev[0];
  const double hi = ev[size - 2];
  out.norm = std::clamp(std::max(std::abs(lo), std::abs(hi)), 0.0, 1.0);
  out.gap = 1.0 - out.norm;
  out.min_eigenvalue = std::min(1.0, lo);
  return out;
}

double psd_check(const WeightedKernel& kernel) {
  return spectral_summary(kernel).min_eigenvalue;
}

} // namespace spectel
