#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace spectel {

class Rng;

/// Sorted, duplicate-free set of 0-based coordinate indices.
using IndexSet = std::vector<std::size_t>;

/// An index set Lambda together with an assignment y on it. Both are stored
/// 0-based; external formats shift coordinate indices by one.
struct CondContext {
  IndexSet lambda;
  std::vector<std::size_t> y;

  std::size_t size() const noexcept { return lambda.size(); }
  bool operator==(const CondContext&) const = default;
};

/// A point (i, x) of the indexed space used by the random walks.
struct IndexedStatePoint {
  std::size_t coord;
  std::size_t value;
};

/// Dense row-major tensor over a list of axes (last axis fastest).
struct Tensor {
  std::vector<std::size_t> axes;
  std::vector<double> values;
};

/// Explicit joint pmf over X_1 x ... x X_n.
///
/// Immutable after construction. The probability vector is row-major with the
/// last axis varying fastest. Inputs whose total mass is within 1e-9 of one are
/// renormalized; anything further off is rejected.
class FiniteTarget {
public:
  static constexpr double kIngestTolerance = 1e-9;

  FiniteTarget(std::vector<std::size_t> axes, std::vector<double> probs);

  /// Parses `{"axes": [...], "probs": [...]}`. Throws ParseError on malformed
  /// JSON and DomainError on well-formed but invalid content.
  static FiniteTarget from_json(std::string_view text);
  nlohmann::json to_json() const;

  std::size_t dims() const noexcept { return axes_.size(); }
  std::size_t axis(std::size_t i) const { return axes_.at(i); }
  std::span<const std::size_t> axes() const noexcept { return axes_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t num_states() const noexcept { return probs_.size(); }
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  std::size_t flat_index(std::span<const std::size_t> x) const;
  void decode(std::size_t flat, std::span<std::size_t> x) const;
  double prob(std::span<const std::size_t> x) const { return probs_[flat_index(x)]; }

private:
  std::vector<std::size_t> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
};

/// Coordinates of -Lambda enumerated canonically (row-major in increasing
/// coordinate order) and mapped back into the joint tensor with y fixed.
class FreeSpace {
public:
  FreeSpace(const FiniteTarget& target, const CondContext& ctx);

  const IndexSet& coords() const noexcept { return coords_; }
  std::size_t num_free() const noexcept { return coords_.size(); }
  std::size_t num_states() const noexcept { return full_index_.size(); }
  std::size_t extent(std::size_t k) const { return extents_[k]; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  std::size_t digit(std::size_t state, std::size_t k) const {
    return (state / strides_[k]) % extents_[k];
  }
  /// Position of a coordinate in coords(); throws DomainError if fixed.
  std::size_t position(std::size_t coord) const;
  std::size_t full_index(std::size_t state) const { return full_index_[state]; }

private:
  IndexSet coords_;
  std::vector<std::size_t> extents_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> full_index_;
};

void validate_index_set(const FiniteTarget& target, const IndexSet& set);
void validate_context(const FiniteTarget& target, const CondContext& ctx);

IndexSet complement(std::size_t n, const IndexSet& set);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
/// All k-subsets of `universe`, lexicographic.
std::vector<IndexSet> subsets_of_size(const IndexSet& universe, std::size_t k);

/// pi_Lambda(y); one for the empty context.
double context_mass(const FiniteTarget& target, const CondContext& ctx);
bool is_supported(const FiniteTarget& target, const CondContext& ctx);

/// Context obtained by additionally fixing coordinate `coord` at `value`.
CondContext extend_context(const CondContext& ctx, std::size_t coord, std::size_t value);

Tensor marginal(const FiniteTarget& target, const IndexSet& gamma);

/// pi_{Gamma|Lambda}(. | y). Unsupported contexts yield the uniform law on X_Gamma.
Tensor conditional(const FiniteTarget& target, const IndexSet& gamma, const CondContext& ctx);

/// Every (Lambda, y) with |Lambda| = lambda_size and pi_Lambda(y) > 0, in
/// canonical order: subsets lexicographic, then y row-major.
std::vector<CondContext> supported_contexts(const FiniteTarget& target, std::size_t lambda_size);

FiniteTarget product_target(const std::vector<std::vector<double>>& marginals);
FiniteTarget product_of_marginals(const FiniteTarget& target);
/// Dirichlet(1) over the full tensor; full support with probability one.
FiniteTarget random_dirichlet_target(std::vector<std::size_t> axes, Rng& rng);

nlohmann::json context_to_json(const CondContext& ctx);

} // namespace spectel
