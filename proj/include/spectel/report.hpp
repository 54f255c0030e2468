#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectel/bounds.hpp"
#include "spectel/target.hpp"

namespace spectel {

const char* version_string();

struct RunResult {
  nlohmann::json report;
  bool pass = false;
};

struct CubeOptions {
  std::size_t n = 4;
  std::size_t steps = 2000000;
  std::uint64_t seed = 0;
  std::size_t tv_points = 100;
  std::size_t contraction_draws = 100000;
  std::size_t eigen_degree = 6;
};

/// Exact profile, telescope and bound checks for each target.
RunResult verify_finite(const std::vector<FiniteTarget>& targets, std::size_t l, std::uint64_t seed,
                        const BoundTolerances& tol = {});

/// Closed forms, eigenrelation, TV and contraction checks and the empirical
/// gap sandwich for the corner target in dimension n (3..8).
RunResult verify_cube(const CubeOptions& options);

/// Concatenates reports; the merged report passes iff every input passes.
RunResult merge_reports(const std::vector<nlohmann::json>& reports);

} // namespace spectel
