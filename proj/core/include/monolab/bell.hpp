#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monolab/rational.hpp"
#include "monolab/scenario.hpp"

namespace monolab {

/// weight * <[sum_k coeffs[k] * A^(k)_{settings[k]} + shift]> with [.] taken
/// mod d and <Omega> = sum_i i P(Omega = i). Parties with a zero coefficient
/// do not take part; their setting is kept at 0.
struct ModularTerm {
  std::vector<int> coeffs;
  std::vector<int> settings;
  int shift = 0;
  Rational weight = 1;

  friend bool operator==(const ModularTerm&, const ModularTerm&) = default;
};

class BellFunctional {
 public:
  /// Throws StructuralError when a term does not fit the scenario (wrong
  /// arity, coefficient outside {-1,0,1}, setting or shift out of range, or no
  /// nonzero coefficient).
  BellFunctional(Scenario scenario, std::vector<ModularTerm> terms, std::string name = {});

  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<ModularTerm>& terms() const noexcept { return terms_; }
  const std::string& name() const noexcept { return name_; }

  /// Claimed local bound and no-signalling minimum, when known.
  std::optional<Rational> classical_bound;
  std::optional<Rational> ns_minimum;

  /// Coefficient of p(a|x) in Scenario::index layout.
  std::vector<Rational> dense() const;

 private:
  Scenario scenario_;
  std::vector<ModularTerm> terms_;
  std::string name_;
};

/// sum_i i * p[i]. Throws StructuralError unless p is a distribution (exact
/// for rationals, within 1e-12 for doubles).
template <Scalar T>
T modular_mean(std::span<const T> distribution);

/// Residuals of the two modular-mean identities for a variable Omega mod d:
///   first  = <[Omega]> + <[-Omega-1]> - (d-1)
///   second = <[Omega]> + <[-Omega]>   - d (1 - P(Omega = 0))
struct Fact1Residuals {
  Rational first;
  Rational second;
};

Fact1Residuals fact1_check(std::span<const Rational> distribution);

/// The two-party chained functional on (2, M, d): 2M terms
/// <[A_a - B_a]> and <[B_a - A_{a+1}]>, the last one wrapping to
/// <[B_M - A_1 - 1]>.
BellFunctional chained_bkp(int settings, int outcomes);

/// N-party functional built by averaging the (N-1)-party one over the new
/// party's setting: the new party enters each term with the opposite sign of
/// the previous last party, whose setting is shifted by the new one. Settings
/// that run past M wrap around and add the coefficient to the term's shift.
BellFunctional recursive_bkp(int parties, int settings, int outcomes);

/// The same functional on a scenario with `extra` trailing parties that do
/// not take part.
BellFunctional append_idle_parties(const BellFunctional& functional, int extra);

/// Evaluation through the term list.
template <Scalar T>
T evaluate(const BellFunctional& functional, const BasicBehavior<T>& behavior);

/// Evaluation as the inner product with dense().
Rational evaluate_dense(const BellFunctional& functional, const Behavior& behavior);

/// Value on a local deterministic vertex, without building the behavior.
Rational evaluate_vertex(const BellFunctional& functional, const DeterministicAssignment& assignment);

struct ClassicalMinimum {
  Rational value;
  DeterministicAssignment argmin;
  std::size_t vertices = 0;
};

/// Minimum over all d^(N*M) local deterministic vertices.
ClassicalMinimum classical_minimum(const BellFunctional& functional);

/// True iff the dense tensor is unchanged when parties `first` and `second`
/// exchange roles.
bool is_party_swap_invariant(const BellFunctional& functional, int first, int second);

/// recursive_bkp(N, M, d) checked against exchanging the last party with the
/// third from last (the first and third for N = 3). Requires N >= 3.
bool symmetry_check(int parties, int settings, int outcomes);

/// Setting indices (Scenario::setting_index) that appear in some term.
std::vector<std::size_t> bell_setting_indices(const BellFunctional& functional);

}  // namespace monolab
