#pragma once

#include <cstddef>
#include <vector>

namespace spectel {

/// Gauss-Legendre rule in long double; nodes ascending.
struct QuadratureRule {
  std::vector<long double> nodes;
  std::vector<long double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  /// The same rule affinely mapped from (-1, 1) onto (a, b).
  QuadratureRule mapped(long double a, long double b) const;

  template <class Fn>
  long double integrate(Fn&& fn) const {
    long double sum = 0.0L;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * fn(nodes[k]);
    return sum;
  }
};

/// Rule with `count` nodes on (-1, 1); exact for polynomials of degree < 2 count.
QuadratureRule gauss_legendre(std::size_t count);

/// Shared 256-node rule on (-1, 1).
const QuadratureRule& standard_rule();

} // namespace spectel
