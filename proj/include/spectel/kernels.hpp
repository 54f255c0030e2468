#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "spectel/target.hpp"

namespace spectel {

/// Largest state space any kernel may be built on.
inline constexpr std::size_t kMaxKernelStates = 20000;

/// Row-stochastic matrix together with a stationary probability vector that
/// defines the weighted L2 geometry. Every kernel built in this module is
/// reversible with respect to its weights.
struct WeightedKernel {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd weights;

  std::size_t num_states() const { return static_cast<std::size_t>(weights.size()); }
};

struct KernelDiagnostics {
  double row_sum_error = 0.0;       // max |sum_j K(i,j) - 1|
  double weight_sum_error = 0.0;    // |sum nu - 1|
  double stationarity_error = 0.0;  // max |(nu K - nu)_j|
  double balance_error = 0.0;       // max |nu_i K(i,j) - nu_j K(j,i)|
};

KernelDiagnostics diagnose(const WeightedKernel& kernel);

struct SpectralSummary {
  double norm = 0.0;            // operator norm on L2_0(nu)
  double gap = 1.0;             // 1 - norm
  double min_eigenvalue = 1.0;  // smallest eigenvalue of the symmetrized operator
};

/// Transition matrix of the block Gibbs sampler for pi_{-Lambda|Lambda}(.|y)
/// with block size l, on -Lambda states in canonical order.
WeightedKernel gibbs_kernel(const FiniteTarget& target, const CondContext& ctx, std::size_t l);

/// Same operator assembled through the recursion over nested contexts.
WeightedKernel recursive_gibbs_kernel(const FiniteTarget& target, const CondContext& ctx,
                                      std::size_t l);

/// Index/value walk on the union of {i} x X_i over free coordinates i.
WeightedKernel random_walk_kernel(const FiniteTarget& target, const CondContext& ctx);

/// Variant that redraws from the conditional marginal when the index repeats.
WeightedKernel altered_random_walk_kernel(const FiniteTarget& target, const CondContext& ctx);

/// Indexed points of the random walk space, in matrix order.
std::vector<IndexedStatePoint> indexed_points(const FiniteTarget& target, const CondContext& ctx);

SpectralSummary spectral_summary(const WeightedKernel& kernel);

/// Smallest eigenvalue of the symmetrized operator.
double psd_check(const WeightedKernel& kernel);

} // namespace spectel
