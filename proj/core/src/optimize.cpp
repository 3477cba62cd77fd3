#include "monolab/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "monolab/errors.hpp"

namespace monolab {
namespace {

struct Callback {
  const Objective* objective;
  std::vector<double> scratch;
  std::size_t evaluations = 0;
};

double trampoline(const gsl_vector* x, void* params) {
  auto* cb = static_cast<Callback*>(params);
  for (std::size_t i = 0; i < cb->scratch.size(); ++i) cb->scratch[i] = gsl_vector_get(x, i);
  ++cb->evaluations;
  double v = (*cb->objective)(cb->scratch);
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

MinimizeResult nelder_mead(const Objective& objective, std::span<const double> start,
                           const MinimizeOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw StructuralError("cannot minimize over zero parameters");
  gsl_set_error_handler_off();

  Callback cb{&objective, std::vector<double>(n), 0};
  gsl_multimin_function fn{&trampoline, n, &cb};
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, start[i]);
  gsl_vector_set_all(step.get(), options.initial_step);
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());

  // Converged once the simplex has shrunk below the tolerance, or once the
  // best value has stopped improving (relative to the tolerance) for a while;
  // near a flat optimum rounding keeps the simplex from shrinking further.
  MinimizeResult result;
  const std::size_t stall_limit = 20 * n;
  std::size_t stalled = 0;
  double last = gsl_multimin_fminimizer_minimum(m.get());
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), options.tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
    const double current = gsl_multimin_fminimizer_minimum(m.get());
    stalled = last - current > options.tolerance * (1 + std::abs(current)) ? 0 : stalled + 1;
    last = std::min(last, current);
    if (stalled >= stall_limit) {
      result.converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(m.get());
  result.point.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.point[i] = gsl_vector_get(best, i);
  result.value = gsl_multimin_fminimizer_minimum(m.get());
  result.converged_starts = result.converged ? 1 : 0;
  result.evaluations = cb.evaluations;
  return result;
}

MinimizeResult multistart_minimize(const Objective& objective, std::span<const double> lower,
                                   std::span<const double> upper, const MinimizeOptions& options,
                                   const std::vector<std::vector<double>>& seed_points) {
  if (lower.size() != upper.size() || lower.empty()) throw StructuralError("search box is malformed");
  std::mt19937_64 rng(options.seed);
  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::max(options.starts, seed_points.size());
  std::vector<double> start(lower.size());
  for (std::size_t s = 0; s < starts; ++s) {
    if (s < seed_points.size()) {
      if (seed_points[s].size() != lower.size()) throw StructuralError("seed point has wrong dimension");
      start = seed_points[s];
    } else {
      for (std::size_t i = 0; i < start.size(); ++i) {
        start[i] = std::uniform_real_distribution<double>(lower[i], upper[i])(rng);
      }
    }
    MinimizeResult run = nelder_mead(objective, start, options);
    best.evaluations += run.evaluations;
    best.converged_starts += run.converged_starts;
    if (run.value < best.value) {
      best.value = run.value;
      best.point = std::move(run.point);
    }
  }
  best.converged = best.converged_starts > 0;
  return best;
}

}  // namespace monolab
