#pragma once

#include <vector>

#include "spectel/rng.hpp"
#include "spectel/target.hpp"

namespace spectel::testing {

// 2x2 target with coordinate marginals (0.4, 0.6) and (0.3, 0.7).
inline FiniteTarget small_target() { return FiniteTarget({2, 2}, {0.1, 0.3, 0.2, 0.4}); }

// Axes (2, 3, 2) with probabilities proportional to 1..12 in row-major order.
inline FiniteTarget ramp_target() {
  std::vector<double> p;
  for (int k = 1; k <= 12; ++k) p.push_back(k / 78.0);
  return FiniteTarget({2, 3, 2}, p);
}

// Random axes in 2..max_axis for n coordinates, Dirichlet(1) probabilities.
inline FiniteTarget random_target(Rng& rng, std::size_t n, std::size_t max_axis) {
  std::vector<std::size_t> axes(n);
  for (auto& a : axes) a = 2 + rng.index(max_axis - 1);
  return random_dirichlet_target(axes, rng);
}

} // namespace spectel::testing
