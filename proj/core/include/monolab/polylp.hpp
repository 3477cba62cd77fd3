#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "monolab/rational.hpp"
#include "monolab/scenario.hpp"

namespace monolab {

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearTerm {
  std::size_t var;
  Rational coef;
};

/// sum_j coef_j * x_j  (relation)  rhs, stored sparsely.
struct Constraint {
  std::vector<LinearTerm> terms;
  Relation relation = Relation::kEqual;
  Rational rhs;
  std::string label;
};

/// Exact linear program. Variables default to x >= 0 with no upper bound.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const noexcept { return objective_.size(); }
  Sense sense() const noexcept { return sense_; }
  const std::vector<Rational>& objective() const noexcept { return objective_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  const std::optional<Rational>& lower(std::size_t var) const { return lower_.at(var); }
  const std::optional<Rational>& upper(std::size_t var) const { return upper_.at(var); }

  void set_objective(std::vector<Rational> coeffs, Sense sense);
  /// Throws StructuralError when a term refers to a variable out of range.
  void add_constraint(Constraint constraint);
  void add_constraints(std::span<const Constraint> constraints);
  /// std::nullopt means unbounded in that direction.
  void set_bounds(std::size_t var, std::optional<Rational> lower, std::optional<Rational> upper);

 private:
  Sense sense_ = Sense::kMinimize;
  std::vector<Rational> objective_;
  std::vector<Constraint> constraints_;
  std::vector<std::optional<Rational>> lower_;
  std::vector<std::optional<Rational>> upper_;
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LPStatus status);

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  Rational value;
  std::vector<Rational> point;
  /// One multiplier per constraint of the program, in the program's sense:
  /// value == b^T y + (bound terms) at optimality. Zero for dropped duplicates.
  std::vector<Rational> duals;
  /// Basic columns of the internal standard form at termination.
  std::vector<std::size_t> basis;
  std::size_t iterations = 0;
};

enum class PivotRule {
  /// Smallest-index entering column throughout.
  kBland,
  /// Most negative reduced cost, switching to Bland's rule during runs of
  /// degenerate pivots.
  kDantzigBlandFallback,
};

struct SolveOptions {
  PivotRule rule = PivotRule::kDantzigBlandFallback;
  std::size_t degenerate_streak = 8;
  std::size_t max_iterations = 2'000'000;
};

/// Two-phase primal simplex in exact rational arithmetic. Infeasible and
/// unbounded programs are reported via `status`.
LPSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

struct CertificateCheck {
  bool primal_feasible = false;
  bool objective_matches = false;
  bool dual_feasible = false;
  bool duality_gap_zero = false;
  bool ok() const noexcept { return primal_feasible && objective_matches && dual_feasible && duality_gap_zero; }
};

/// Re-verifies an optimal solution from scratch: primal feasibility, the
/// objective value at the point, sign-feasibility of the duals and a zero
/// duality gap. Independent of the solver's internal tableau.
CertificateCheck verify_solution(const LinearProgram& lp, const LPSolution& solution);

/// Normalization and no-signalling equalities for behaviors of `scenario`,
/// with variables indexed as in Scenario::index. Nonnegativity is carried by
/// the default variable bounds. No-signalling is imposed party by party:
/// summing out party k must give the same result for every x_k (compared
/// against x_k = 0). Together with normalization this implies independence
/// for every party subset.
struct NsConstraintSet {
  std::vector<Constraint> constraints;
  std::size_t normalization_count = 0;
  std::size_t no_signalling_count = 0;
};

NsConstraintSet ns_constraints(const Scenario& scenario);

struct NsOptimum {
  LPSolution solution;
  /// The optimizing behavior when status is optimal.
  std::optional<Behavior> behavior;
};

/// Optimizes a linear objective (dense, Scenario::index layout) over the
/// no-signalling polytope intersected with `extra` constraints.
NsOptimum optimize_over_ns(const Scenario& scenario, std::span<const Rational> objective, Sense sense,
                           std::span<const Constraint> extra = {}, const SolveOptions& options = {});

/// Nearest no-signalling behavior in L1 distance (exact).
Behavior project_to_ns_l1(const Behavior& point, const SolveOptions& options = {});

/// A random point with small-denominator rational entries, projected onto the
/// no-signalling polytope in L1.
Behavior random_ns_behavior(const Scenario& scenario, std::mt19937_64& rng, const SolveOptions& options = {});

}  // namespace monolab
