#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace monolab {

using Objective = std::function<double(std::span<const double>)>;

struct MinimizeOptions {
  std::size_t starts = 32;
  /// Simplex size at which a run counts as converged.
  double tolerance = 1e-9;
  std::size_t max_iterations = 20'000;
  double initial_step = 0.5;
  std::uint64_t seed = 1;
};

struct MinimizeResult {
  std::vector<double> point;
  double value = 0.0;
  /// True when at least one start reached the tolerance.
  bool converged = false;
  std::size_t converged_starts = 0;
  std::size_t evaluations = 0;
};

/// One derivative-free simplex run from `start`.
MinimizeResult nelder_mead(const Objective& objective, std::span<const double> start,
                           const MinimizeOptions& options = {});

/// Best of `options.starts` runs from points drawn uniformly in the box
/// [lower, upper]. When `seed_points` is nonempty those are used as the first
/// starts. Deterministic for a fixed seed.
MinimizeResult multistart_minimize(const Objective& objective, std::span<const double> lower,
                                   std::span<const double> upper, const MinimizeOptions& options = {},
                                   const std::vector<std::vector<double>>& seed_points = {});

}  // namespace monolab
