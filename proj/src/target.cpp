#include "spectel/target.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectel/errors.hpp"
#include "spectel/rng.hpp"

namespace spectel {

namespace {

std::string coord_name(std::size_t i) { return std::to_string(i + 1); }

std::vector<std::size_t> row_major_strides(std::span<const std::size_t> extents) {
  std::vector<std::size_t> strides(extents.size(), 1);
  for (std::size_t k = extents.size(); k-- > 1;) strides[k - 1] = strides[k] * extents[k];
  return strides;
}

std::size_t product(std::span<const std::size_t> extents) {
  return std::accumulate(extents.begin(), extents.end(), std::size_t{1},
                         std::multiplies<>());
}

} // namespace

FiniteTarget::FiniteTarget(std::vector<std::size_t> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  if (axes_.size() < 2) throw DomainError("target needs at least two coordinates");
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i] < 2)
      throw DomainError("alphabet of coordinate " + coord_name(i) + " has fewer than two values");
  }
  const std::size_t expected = product(axes_);
  if (probs_.size() != expected) {
    throw DomainError("probs has " + std::to_string(probs_.size()) + " entries, axes require " +
                      std::to_string(expected));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw DomainError("probabilities must be finite and nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > kIngestTolerance) {
    throw DomainError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (double& p : probs_) p /= total;
  strides_ = row_major_strides(axes_);
}

FiniteTarget FiniteTarget::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed target JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("axes") || !doc.contains("probs"))
    throw ParseError("target JSON must be an object with \"axes\" and \"probs\"");
  const auto& axes = doc["axes"];
  const auto& probs = doc["probs"];
  if (!axes.is_array() || !probs.is_array()) throw ParseError("\"axes\" and \"probs\" must be arrays");
  std::vector<std::size_t> ax;
  for (const auto& a : axes) {
    if (!a.is_number_integer() || a.get<long long>() < 0)
      throw ParseError("\"axes\" entries must be nonnegative integers");
    ax.push_back(a.get<std::size_t>());
  }
  std::vector<double> pr;
  pr.reserve(probs.size());
  for (const auto& p : probs) {
    if (!p.is_number()) throw ParseError("\"probs\" entries must be numbers");
    pr.push_back(p.get<double>());
  }
  return FiniteTarget(std::move(ax), std::move(pr));
}

nlohmann::json FiniteTarget::to_json() const {
  return {{"axes", axes_}, {"probs", probs_}};
}

std::size_t FiniteTarget::flat_index(std::span<const std::size_t> x) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) flat += x[i] * strides_[i];
  return flat;
}

void FiniteTarget::decode(std::size_t flat, std::span<std::size_t> x) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) x[i] = (flat / strides_[i]) % axes_[i];
}

FreeSpace::FreeSpace(const FiniteTarget& target, const CondContext& ctx) {
  validate_context(target, ctx);
  coords_ = complement(target.dims(), ctx.lambda);
  for (auto c : coords_) extents_.push_back(target.axis(c));
  strides_ = row_major_strides(extents_);

  std::size_t base = 0;
  for (std::size_t k = 0; k < ctx.lambda.size(); ++k) base += ctx.y[k] * target.stride(ctx.lambda[k]);

  const std::size_t count = product(extents_);
  full_index_.resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t flat = base;
    for (std::size_t k = 0; k < coords_.size(); ++k) flat += digit(s, k) * target.stride(coords_[k]);
    full_index_[s] = flat;
  }
}

std::size_t FreeSpace::position(std::size_t coord) const {
  auto it = std::lower_bound(coords_.begin(), coords_.end(), coord);
  if (it == coords_.end() || *it != coord)
    throw DomainError("coordinate " + coord_name(coord) + " is not free in this context");
  return static_cast<std::size_t>(it - coords_.begin());
}

void validate_index_set(const FiniteTarget& target, const IndexSet& set) {
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k] >= target.dims())
      throw DomainError("coordinate index " + coord_name(set[k]) + " out of range");
    if (k > 0 && set[k] <= set[k - 1]) throw DomainError("index set must be strictly increasing");
  }
}

void validate_context(const FiniteTarget& target, const CondContext& ctx) {
  validate_index_set(target, ctx.lambda);
  if (ctx.lambda.size() + 1 > target.dims())
    throw DomainError("conditioning set must leave at least one coordinate free");
  if (ctx.y.size() != ctx.lambda.size())
    throw DomainError("assignment length does not match conditioning set");
  for (std::size_t k = 0; k < ctx.y.size(); ++k) {
    if (ctx.y[k] >= target.axis(ctx.lambda[k]))
      throw DomainError("value out of range for coordinate " + coord_name(ctx.lambda[k]));
  }
}

IndexSet complement(std::size_t n, const IndexSet& set) {
  IndexSet out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < set.size() && set[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<IndexSet> subsets_of_size(const IndexSet& universe, std::size_t k) {
  std::vector<IndexSet> out;
  if (k > universe.size()) return out;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    IndexSet s;
    for (auto p : pick) s.push_back(universe[p]);
    out.push_back(std::move(s));
    std::size_t j = k;
    while (j > 0 && pick[j - 1] == universe.size() - k + j - 1) --j;
    if (j == 0) break;
    ++pick[j - 1];
    for (std::size_t t = j; t < k; ++t) pick[t] = pick[t - 1] + 1;
  }
  return out;
}

double context_mass(const FiniteTarget& target, const CondContext& ctx) {
  validate_context(target, ctx);
  if (ctx.lambda.empty()) return 1.0;
  const FreeSpace space(target, ctx);
  double mass = 0.0;
  for (std::size_t s = 0; s < space.num_states(); ++s) mass += target.probs()[space.full_index(s)];
  return mass;
}

bool is_supported(const FiniteTarget& target, const CondContext& ctx) {
  return context_mass(target, ctx) > 0.0;
}

CondContext extend_context(const CondContext& ctx, std::size_t coord, std::size_t value) {
  CondContext out;
  bool placed = false;
  for (std::size_t k = 0; k < ctx.lambda.size(); ++k) {
    if (ctx.lambda[k] == coord) throw DomainError("coordinate already conditioned on");
    if (!placed && coord < ctx.lambda[k]) {
      out.lambda.push_back(coord);
      out.y.push_back(value);
      placed = true;
    }
    out.lambda.push_back(ctx.lambda[k]);
    out.y.push_back(ctx.y[k]);
  }
  if (!placed) {
    out.lambda.push_back(coord);
    out.y.push_back(value);
  }
  return out;
}

namespace {

// Sums the joint mass restricted to ctx into a tensor over gamma.
Tensor accumulate(const FiniteTarget& target, const IndexSet& gamma, const CondContext& ctx) {
  Tensor t;
  for (auto g : gamma) t.axes.push_back(target.axis(g));
  const auto strides = row_major_strides(t.axes);
  t.values.assign(product(t.axes), 0.0);

  const FreeSpace space(target, ctx);
  std::vector<std::size_t> pos;
  for (auto g : gamma) pos.push_back(space.position(g));
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < gamma.size(); ++k) idx += space.digit(s, pos[k]) * strides[k];
    t.values[idx] += target.probs()[space.full_index(s)];
  }
  return t;
}

} // namespace

Tensor marginal(const FiniteTarget& target, const IndexSet& gamma) {
  if (gamma.empty()) throw DomainError("marginal needs a nonempty index set");
  validate_index_set(target, gamma);
  if (gamma.size() == target.dims()) {
    return Tensor{std::vector<std::size_t>(target.axes().begin(), target.axes().end()),
                  std::vector<double>(target.probs().begin(), target.probs().end())};
  }
  return accumulate(target, gamma, CondContext{});
}

Tensor conditional(const FiniteTarget& target, const IndexSet& gamma, const CondContext& ctx) {
  if (gamma.empty()) throw DomainError("conditional needs a nonempty index set");
  validate_index_set(target, gamma);
  validate_context(target, ctx);
  for (auto g : gamma) {
    if (std::binary_search(ctx.lambda.begin(), ctx.lambda.end(), g))
      throw DomainError("conditioned and target index sets overlap");
  }
  Tensor t = accumulate(target, gamma, ctx);
  const double mass = std::accumulate(t.values.begin(), t.values.end(), 0.0);
  if (mass > 0.0) {
    for (double& v : t.values) v /= mass;
  } else {
    std::fill(t.values.begin(), t.values.end(), 1.0 / static_cast<double>(t.values.size()));
  }
  return t;
}

std::vector<CondContext> supported_contexts(const FiniteTarget& target, std::size_t lambda_size) {
  if (lambda_size + 1 > target.dims())
    throw DomainError("conditioning set size must be at most n - 1");
  std::vector<CondContext> out;
  IndexSet all(target.dims());
  std::iota(all.begin(), all.end(), 0);
  for (auto& lambda : subsets_of_size(all, lambda_size)) {
    if (lambda.empty()) {
      out.push_back(CondContext{});
      continue;
    }
    const Tensor m = marginal(target, lambda);
    const auto strides = row_major_strides(m.axes);
    for (std::size_t idx = 0; idx < m.values.size(); ++idx) {
      if (!(m.values[idx] > 0.0)) continue;
      CondContext ctx{lambda, std::vector<std::size_t>(lambda.size())};
      for (std::size_t k = 0; k < lambda.size(); ++k) ctx.y[k] = (idx / strides[k]) % m.axes[k];
      out.push_back(std::move(ctx));
    }
  }
  return out;
}

FiniteTarget product_target(const std::vector<std::vector<double>>& marginals) {
  std::vector<std::size_t> axes;
  for (const auto& p : marginals) axes.push_back(p.size());
  std::vector<double> probs(product(axes), 1.0);
  const auto strides = row_major_strides(axes);
  for (std::size_t flat = 0; flat < probs.size(); ++flat) {
    for (std::size_t i = 0; i < axes.size(); ++i) probs[flat] *= marginals[i][(flat / strides[i]) % axes[i]];
  }
  return FiniteTarget(std::move(axes), std::move(probs));
}

FiniteTarget product_of_marginals(const FiniteTarget& target) {
  std::vector<std::vector<double>> marginals;
  for (std::size_t i = 0; i < target.dims(); ++i) marginals.push_back(marginal(target, {i}).values);
  return product_target(marginals);
}

FiniteTarget random_dirichlet_target(std::vector<std::size_t> axes, Rng& rng) {
  std::vector<double> probs(product(axes));
  double total = 0.0;
  for (double& p : probs) total += (p = rng.exponential());
  for (double& p : probs) p /= total;
  return FiniteTarget(std::move(axes), std::move(probs));
}

nlohmann::json context_to_json(const CondContext& ctx) {
  std::vector<std::size_t> lambda;
  for (auto c : ctx.lambda) lambda.push_back(c + 1);
  return {{"lambda", lambda}, {"y", ctx.y}};
}

} // namespace spectel
