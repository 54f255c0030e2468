#pragma once

#include <cstddef>
#include <vector>

#include "spectel/rng.hpp"
#include "spectel/target.hpp"

namespace spectel {

/// Exact draw from pi by inversion of the flat cumulative mass.
std::vector<std::size_t> exact_draw(const FiniteTarget& target, Rng& rng);

/// One step of the block Gibbs sampler: a uniformly chosen block of l
/// coordinates is redrawn from its conditional law given the rest.
void gibbs_update(const FiniteTarget& target, std::vector<std::size_t>& state, std::size_t l, Rng& rng);

} // namespace spectel
