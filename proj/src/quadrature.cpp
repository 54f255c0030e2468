#include "spectel/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "spectel/errors.hpp"

namespace spectel {

QuadratureRule QuadratureRule::mapped(long double a, long double b) const {
  QuadratureRule out;
  const long double half = 0.5L * (b - a);
  const long double mid = 0.5L * (b + a);
  out.nodes.reserve(nodes.size());
  out.weights.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.nodes.push_back(mid + half * nodes[k]);
    out.weights.push_back(half * weights[k]);
  }
  return out;
}

QuadratureRule gauss_legendre(std::size_t count) {
  if (count == 0) throw DomainError("quadrature needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  const long double n = static_cast<long double>(count);
  const std::size_t half = (count + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on the three-term recurrence.
    long double z = std::cos(std::numbers::pi_v<long double> * (static_cast<long double>(i) + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = z;
      for (std::size_t j = 2; j <= count; ++j) {
        const long double jj = static_cast<long double>(j);
        const long double p2 = ((2.0L * jj - 1.0L) * z * p1 - (jj - 1.0L) * p0) / jj;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0L);
      const long double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[count - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  return rule;
}

const QuadratureRule& standard_rule() {
  static const QuadratureRule rule = gauss_legendre(256);
  return rule;
}

} // namespace spectel
