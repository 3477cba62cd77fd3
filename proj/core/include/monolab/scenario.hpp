#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "monolab/rational.hpp"

namespace monolab {

/// Upper bound on d^N * M^N accepted by Scenario unless overridden through
/// the MONOGAMY_LAB_CAP environment variable.
inline constexpr std::size_t kDefaultSizeCap = 10'000'000;

/// The active size cap: MONOGAMY_LAB_CAP if set and parseable, else the default.
std::size_t size_cap();

/// An (N, M, d) Bell scenario: N parties, M settings per party, d outcomes
/// per measurement. Settings and outcomes are 0-based throughout.
///
/// Behaviors over a scenario are flattened with the setting tuple outermost
/// and the outcome tuple innermost; within a tuple party 0 is the most
/// significant digit:
///
///   index(a, x) = setting_index(x) * d^N + outcome_index(a)
class Scenario {
 public:
  /// Throws StructuralError for N < 1, M < 1 or d < 2 and CapacityError when
  /// d^N * M^N exceeds `cap`.
  Scenario(int parties, int settings, int outcomes, std::size_t cap = size_cap());

  int parties() const noexcept { return parties_; }
  int settings() const noexcept { return settings_; }
  int outcomes() const noexcept { return outcomes_; }

  /// M^N
  std::size_t setting_tuples() const noexcept { return setting_tuples_; }
  /// d^N
  std::size_t outcome_tuples() const noexcept { return outcome_tuples_; }
  /// d^N * M^N
  std::size_t size() const noexcept { return setting_tuples_ * outcome_tuples_; }

  std::size_t setting_index(std::span<const int> settings) const;
  std::size_t outcome_index(std::span<const int> outcomes) const;
  std::size_t index(std::span<const int> outcomes, std::span<const int> settings) const {
    return setting_index(settings) * outcome_tuples_ + outcome_index(outcomes);
  }

  std::vector<int> setting_tuple(std::size_t setting_index) const;
  std::vector<int> outcome_tuple(std::size_t outcome_index) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  int parties_;
  int settings_;
  int outcomes_;
  std::size_t setting_tuples_;
  std::size_t outcome_tuples_;
};

/// Writes the base-`base` digits of `value` (most significant first) into `digits`.
void decode_digits(std::size_t value, int base, std::span<int> digits);
std::size_t encode_digits(std::span<const int> digits, int base);

/// A full conditional probability table p(a|x) over a scenario. Immutable once
/// built. The constructor only checks the array length, so invalid or
/// signalling tables are representable; use validate() and
/// check_nonsignalling() to classify them.
template <Scalar T>
class BasicBehavior {
 public:
  BasicBehavior(Scenario scenario, std::vector<T> probs);

  static BasicBehavior uniform(const Scenario& scenario);

  const Scenario& scenario() const noexcept { return scenario_; }
  std::span<const T> values() const noexcept { return probs_; }
  const T& at(std::size_t setting_index, std::size_t outcome_index) const {
    return probs_[setting_index * scenario_.outcome_tuples() + outcome_index];
  }
  const T& at(std::span<const int> outcomes, std::span<const int> settings) const {
    return probs_[scenario_.index(outcomes, settings)];
  }
  /// The distribution over outcome tuples for one setting tuple.
  std::span<const T> column(std::size_t setting_index) const {
    return std::span<const T>(probs_).subspan(setting_index * scenario_.outcome_tuples(),
                                              scenario_.outcome_tuples());
  }

  friend bool operator==(const BasicBehavior&, const BasicBehavior&) = default;

 private:
  Scenario scenario_;
  std::vector<T> probs_;
};

using Behavior = BasicBehavior<Rational>;
using FloatBehavior = BasicBehavior<double>;

FloatBehavior to_float(const Behavior& behavior);

enum class ViolationKind { kNegative, kNormalization };

template <Scalar T>
struct Violation {
  ViolationKind kind;
  std::size_t setting_index;
  /// Offending outcome tuple for kNegative; unused for kNormalization.
  std::size_t outcome_index;
  /// The negative entry, or the column sum minus one.
  T amount;
};

template <Scalar T>
struct ValidationReport {
  std::vector<Violation<T>> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Nonnegativity and per-setting normalization. `tol` is ignored for exact
/// behaviors.
template <Scalar T>
ValidationReport<T> validate(const BasicBehavior<T>& behavior, double tol = 0.0);

template <Scalar T>
struct SignallingReport {
  bool nonsignalling;
  /// Largest spread of any marginal across complement settings.
  T worst_violation;
};

/// Checks every nonempty proper party subset: its marginal must not depend on
/// the settings of the remaining parties. Exact for rational behaviors.
template <Scalar T>
SignallingReport<T> check_nonsignalling(const BasicBehavior<T>& behavior, double tol = 0.0);

template <Scalar T>
struct Marginal {
  std::vector<int> parties;
  /// Distribution over outcome tuples of `parties`, listed in that order.
  std::vector<T> probs;
  /// True when the marginal differs across complement settings; `probs` is
  /// then taken with every complement setting fixed to 0.
  bool complement_dependent = false;
};

/// Marginal on a nonempty party subset at the given settings for those
/// parties (`settings[i]` belongs to `parties[i]`).
template <Scalar T>
Marginal<T> marginal(const BasicBehavior<T>& behavior, std::span<const int> parties,
                     std::span<const int> settings);

/// outcome[k][x] is the answer of party k to setting x.
struct DeterministicAssignment {
  std::vector<std::vector<int>> outcome;
};

/// The local deterministic behavior p(a|x) = prod_k [a_k == o(k, x_k)].
Behavior deterministic_vertex(const Scenario& scenario, const DeterministicAssignment& assignment);

/// Visits all d^(N*M) assignments in lexicographic order.
void for_each_deterministic_assignment(
    const Scenario& scenario, const std::function<void(const DeterministicAssignment&)>& visit);

/// Convex combination; weights must be nonnegative and sum to one (exactly
/// for rationals, within 1e-12 for doubles).
template <Scalar T>
BasicBehavior<T> mix(std::span<const BasicBehavior<T>> behaviors, std::span<const T> weights);

/// p((a1,a2)|(x1,x2)) = p1(a1|x1) p2(a2|x2); parties of `first` come first.
template <Scalar T>
BasicBehavior<T> product(const BasicBehavior<T>& first, const BasicBehavior<T>& second);

}  // namespace monolab
