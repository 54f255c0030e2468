#include "spectel/sampler.hpp"

#include <numeric>

#include "spectel/errors.hpp"

namespace spectel {

namespace {

std::size_t draw_weighted(const std::vector<double>& weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return rng.index(weights.size());
  const double u = rng.uniform_open() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  // Rounding can leave u just above the final partial sum.
  for (std::size_t k = weights.size(); k-- > 0;)
    if (weights[k] > 0.0) return k;
  return weights.size() - 1;
}

} // namespace

std::vector<std::size_t> exact_draw(const FiniteTarget& target, Rng& rng) {
  const auto probs = target.probs();
  const std::size_t flat = draw_weighted(std::vector<double>(probs.begin(), probs.end()), rng);
  std::vector<std::size_t> x(target.dims());
  target.decode(flat, x);
  return x;
}

void gibbs_update(const FiniteTarget& target, std::vector<std::size_t>& state, std::size_t l, Rng& rng) {
  const std::size_t n = target.dims();
  if (state.size() != n) throw DomainError("state has the wrong number of coordinates");
  if (l < 1 || l > n) throw DomainError("block size must lie in 1..n");

  // Partial Fisher-Yates: the first l entries form a uniform l-subset.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = 0; k < l; ++k) std::swap(order[k], order[k + rng.index(n - k)]);
  std::vector<std::size_t> block(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l));

  std::size_t assignments = 1;
  for (auto c : block) assignments *= target.axis(c);
  std::vector<double> weights(assignments);
  std::vector<std::size_t> x = state;
  for (std::size_t a = 0; a < assignments; ++a) {
    std::size_t rest = a;
    for (std::size_t k = l; k-- > 0;) {
      x[block[k]] = rest % target.axis(block[k]);
      rest /= target.axis(block[k]);
    }
    weights[a] = target.prob(x);
  }
  std::size_t rest = draw_weighted(weights, rng);
  for (std::size_t k = l; k-- > 0;) {
    state[block[k]] = rest % target.axis(block[k]);
    rest /= target.axis(block[k]);
  }
}

} // namespace spectel
