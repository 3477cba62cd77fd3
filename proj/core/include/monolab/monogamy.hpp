#pragma once

#include <optional>
#include <vector>

#include "monolab/bell.hpp"
#include "monolab/polylp.hpp"
#include "monolab/rational.hpp"
#include "monolab/scenario.hpp"

namespace monolab {

// Party and setting indices are 0-based. In an (N+1)-party behavior the first
// N parties form the Bell group and party N is the outsider.

/// The functional I^{N,M,d}(first N parties) + <[A^(k)_{xk} - A^(N)_{xo}]> +
/// <[A^(N)_{xo} - A^(k)_{xk}]> on the (N+1)-party scenario.
BellFunctional monogamy_functional(const Scenario& scenario, int party, int party_setting, int outsider_setting);

/// The (N+1)-party functional that evaluates I^{N,M,d} on the first N parties.
BellFunctional group_functional(const Scenario& scenario);

/// Left-hand side of the three-party relation on a (3, M, d) behavior, with
/// X = party 0 or 1 measuring setting i and the third party setting j.
/// Throws HypothesisError for signalling behaviors.
Rational monogamy_lhs_tripartite(const Behavior& behavior, int party, int i, int j);

/// Left-hand side of the (N+1)-party relation. Throws HypothesisError for
/// signalling behaviors.
Rational monogamy_lhs_general(const Behavior& behavior, int party, int party_setting, int outsider_setting);

struct AgreementCheck {
  /// p(A^(k)_{xk} = [A^(N)_{xo} + m])
  Rational probability;
  /// I^{N,M,d} of the first N parties.
  Rational bell_value;
  /// I + 1 >= d p
  bool holds = false;
};

AgreementCheck agreement_probability(const Behavior& behavior, int party, int party_setting, int outsider_setting,
                                     int shift = 0);

/// Linear objective for p(A^(k)_{xk} = [A^(N)_{xo} + m]) in Scenario::index
/// layout. Only meaningful on no-signalling behaviors.
std::vector<Rational> agreement_objective(const Scenario& scenario, int party, int party_setting,
                                          int outsider_setting, int shift = 0);

/// (1 + I) / d clamped to at most 1. Throws StructuralError for I < 0.
template <Scalar T>
T guessing_bound(const T& bell_value, int outcomes);

/// (1/d)(1 + d^N (N-1) I / 4) clamped to at most 1. Throws StructuralError
/// for I < 0.
template <Scalar T>
T guessing_bound_prior(const T& bell_value, int parties, int outcomes);

/// The same bounds without the clamp.
template <Scalar T>
T guessing_bound_unclamped(const T& bell_value, int outcomes);
template <Scalar T>
T guessing_bound_prior_unclamped(const T& bell_value, int parties, int outcomes);

/// The value of I above which the prior bound reaches 1: 4(d-1) / (d^N (N-1)).
Rational prior_bound_saturation(int parties, int outcomes);

enum class RelationForm {
  /// lhs = I + <[X - C]> + <[C - X]>, bound = d - 1
  kSum,
  /// lhs = I + 1, bound = d p(X = [C + m])
  kAgreement,
};

struct MonogamyRecord {
  RelationForm form = RelationForm::kSum;
  int party = 0;
  int party_setting = 0;
  int outsider_setting = 0;
  /// Only for kAgreement.
  std::optional<int> shift;
  /// I^{N,M,d} of the Bell group.
  Rational bell_value;
  Rational lhs;
  Rational bound;
  Rational slack;
  bool satisfied = false;
};

struct MonogamyReport {
  std::vector<MonogamyRecord> records;
  bool all_satisfied() const noexcept;
};

/// Every relation of both forms for every party, setting pair and shift.
/// Throws HypothesisError for signalling behaviors.
MonogamyReport monogamy_report(const Behavior& behavior);

/// {0, (d-1)/4, (d-1)/2, 3(d-1)/4, d-1}
std::vector<Rational> default_tightness_grid(int outcomes);

struct TightnessRow {
  Rational target;
  /// False for targets outside [0, d-1] or when the LP is infeasible.
  bool feasible = false;
  std::optional<Rational> lp_max;
  Rational bound;
  bool tight = false;
};

/// For each target t, maximizes p(A^(k)_{xk} = A^(N)_{xo}) over the
/// no-signalling polytope subject to I^{N,M,d} = t and compares it with
/// (1 + t) / d. Rows come back in grid order.
std::vector<TightnessRow> tightness_scan(const Scenario& scenario, int party, int party_setting,
                                         int outsider_setting, const std::vector<Rational>& grid,
                                         unsigned jobs = 1, const SolveOptions& options = {});

}  // namespace monolab
