#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "monolab/bell.hpp"
#include "monolab/rational.hpp"
#include "monolab/scenario.hpp"

namespace monolab {

/// A bit source whose every conditional bit probability lies in
/// [1/2 - epsilon, 1/2 + epsilon].
struct SVSource {
  Rational epsilon;
  std::size_t length = 0;

  /// Throws StructuralError unless 0 <= epsilon < 1/2.
  void check() const;
  /// True iff every p(bit = 1 | prefix) lies in the box. `one_probability`
  /// lists them prefix by prefix: entry 2^k - 1 + prefix for bit k.
  bool admits(std::span<const Rational> one_probability) const;
  /// Distribution over the 2^length strings (bit 0 most significant) defined
  /// by the conditional probabilities above.
  std::vector<Rational> string_distribution(std::span<const Rational> one_probability) const;
  /// (1 + 2 epsilon) / (1 - 2 epsilon)
  Rational likelihood_ratio() const;
};

struct AdversaryStrategy {
  /// p(a|x, w); must be no-signalling.
  Behavior behavior;
  /// p(x|w) over setting tuples (Scenario::setting_index order).
  std::vector<Rational> inputs;
};

/// The adversary's hidden variable W picks a strategy with probability
/// prior[w]; each strategy fixes both the devices and the input distribution.
class AdversaryModel {
 public:
  /// Throws HypothesisError for signalling strategies and StructuralError for
  /// malformed or unnormalized distributions.
  AdversaryModel(Scenario scenario, std::vector<AdversaryStrategy> strategies, std::vector<Rational> prior);

  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<AdversaryStrategy>& strategies() const noexcept { return strategies_; }
  const std::vector<Rational>& prior() const noexcept { return prior_; }

  /// p(x) = sum_w p(w) p(x|w)
  Rational input_probability(std::size_t setting_index) const;
  /// p(w|x); throws StructuralError when p(x) = 0.
  Rational posterior(std::size_t strategy, std::size_t setting_index) const;

 private:
  Scenario scenario_;
  std::vector<AdversaryStrategy> strategies_;
  std::vector<Rational> prior_;
};

/// p(a|x) = sum_w p(w|x) p(a|x, w). Setting tuples with p(x) = 0 outside the
/// Bell expression get the prior mixture sum_w p(w) p(a|x, w). Throws
/// StructuralError when a setting of the Bell expression has p(x) = 0.
Behavior observed_behavior(const AdversaryModel& model);

/// max_w p(w|x) / min_{x'} p(w|x') with x' over the Bell expression's
/// settings. Empty when some minimum is zero (unbounded).
std::optional<Rational> q_factor(const AdversaryModel& model, std::size_t setting_index);

/// max_w p(x|w) / min_{x'} p(x'|w), same minimum range.
std::optional<Rational> q_factor_tilde(const AdversaryModel& model, std::size_t setting_index);

enum class QVariant {
  /// Uses q_factor (holds for any input distribution).
  kPosterior,
  /// Uses q_factor_tilde (stated for equal p(x)).
  kLikelihood,
};

struct VariationalCheck {
  /// sum_{a_k, w} |p(a_k, w|x) - p(w|x) / d|
  Rational lhs;
  /// Half of lhs (variational distance normalization).
  Rational lhs_half;
  Rational bell_value;
  /// Empty when the Q factor is unbounded.
  std::optional<Rational> q;
  /// ((d-1)^2 + 1) / d * Q * I, and half of it.
  std::optional<Rational> rhs;
  std::optional<Rational> rhs_half;
  bool satisfied = false;
};

VariationalCheck variational_bound(const AdversaryModel& model, std::size_t setting_index, int party,
                                   QVariant variant = QVariant::kPosterior);

/// (2^(1/N) - 1) / (2 (2^(1/N) + 1)); throws StructuralError for N < 2.
double critical_epsilon(int parties);
/// The same with 1/(N-1) in place of 1/N; throws StructuralError for N < 2.
double critical_epsilon_common(int parties);

enum class SourceVariant {
  /// Every party draws its settings from its own source: N r uses.
  kIndependent,
  /// One source generates all settings of the Bell expression: 1 + (N-1) r uses.
  kCommon,
};

const char* to_string(SourceVariant variant);

struct FeasibilityRow {
  int parties = 0;
  int outcomes = 0;
  double epsilon = 0.0;
  int settings = 0;
  int rounds = 0;
  int exponent = 0;
  double violation = 0.0;
  double rhs_bound = 0.0;
  SourceVariant variant = SourceVariant::kIndependent;
};

struct FeasibilityCurve {
  std::vector<FeasibilityRow> rows;
  /// Whether rhs_bound strictly decreases along the tested M values.
  bool independent_decreasing = false;
  bool common_decreasing = false;
  /// epsilon below the corresponding critical value.
  bool independent_below_threshold = false;
  bool common_below_threshold = false;
};

/// rhs_bound(M) = ((d-1)^2+1)/d * q^exponent * I(M) with q = (1+2e)/(1-2e),
/// r = ceil(log2 M), for both source variants. `violation(M)` supplies the
/// quantum value of the Bell expression at M settings.
FeasibilityCurve feasibility_curve(int parties, int outcomes, double epsilon, std::span<const int> settings,
                                   const std::function<double(int)>& violation);

/// ceil(log2 M) for M >= 1.
int setting_rounds(int settings);

struct ModelGenerationOptions {
  Rational epsilon = make_rational(1, 10);
  std::size_t max_strategies = 8;
  /// Denominator used for random weights and biases.
  int granularity = 12;
};

/// A random model whose strategies are convex mixtures of local deterministic
/// vertices and the behaviors in `pool`, with inputs drawn from SV sources of
/// bias `epsilon` (r bits per party, the party's setting is the r-bit value
/// mod M).
AdversaryModel random_adversary_model(const Scenario& scenario, std::span<const Behavior> pool, std::mt19937_64& rng,
                                      const ModelGenerationOptions& options = {});

}  // namespace monolab
