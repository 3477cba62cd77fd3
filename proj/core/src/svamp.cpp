#include "monolab/svamp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monolab/errors.hpp"

namespace monolab {
namespace {

Rational sum_of(std::span<const Rational> values) {
  Rational s = 0;
  for (const auto& v : values) s += v;
  return s;
}

void check_distribution(std::span<const Rational> values, const char* what) {
  for (const auto& v : values) {
    if (v < 0) throw StructuralError(std::string(what) + " has a negative entry");
  }
  if (sum_of(values) != 1) throw StructuralError(std::string(what) + " does not sum to 1");
}

std::vector<std::size_t> expression_settings(const Scenario& scenario) {
  return bell_setting_indices(recursive_bkp(scenario.parties(), scenario.settings(), scenario.outcomes()));
}

Rational random_fraction(std::mt19937_64& rng, int granularity) {
  return make_rational(std::uniform_int_distribution<int>(0, granularity)(rng), granularity);
}

}  // namespace

void SVSource::check() const {
  if (epsilon < 0 || epsilon >= make_rational(1, 2)) throw StructuralError("epsilon must lie in [0, 1/2)");
}

bool SVSource::admits(std::span<const Rational> one_probability) const {
  check();
  const Rational half = make_rational(1, 2);
  return std::all_of(one_probability.begin(), one_probability.end(),
                     [&](const Rational& p) { return p >= half - epsilon && p <= half + epsilon; });
}

std::vector<Rational> SVSource::string_distribution(std::span<const Rational> one_probability) const {
  if (length > 24) throw CapacityError("source strings longer than 24 bits");
  const std::size_t strings = std::size_t{1} << length;
  if (one_probability.size() != strings - 1) throw StructuralError("one conditional probability per prefix expected");
  if (!admits(one_probability)) throw StructuralError("conditional bit probability outside the source box");
  std::vector<Rational> dist(strings);
  for (std::size_t s = 0; s < strings; ++s) {
    Rational p = 1;
    std::size_t prefix = 0;
    for (std::size_t k = 0; k < length; ++k) {
      const int bit = static_cast<int>((s >> (length - 1 - k)) & 1U);
      const Rational& one = one_probability[(std::size_t{1} << k) - 1 + prefix];
      p *= bit ? one : Rational(1 - one);
      prefix = (prefix << 1) | static_cast<std::size_t>(bit);
    }
    dist[s] = p;
  }
  return dist;
}

Rational SVSource::likelihood_ratio() const {
  check();
  Rational r = (1 + 2 * epsilon) / (1 - 2 * epsilon);
  r.canonicalize();
  return r;
}

AdversaryModel::AdversaryModel(Scenario scenario, std::vector<AdversaryStrategy> strategies,
                               std::vector<Rational> prior)
    : scenario_(std::move(scenario)), strategies_(std::move(strategies)), prior_(std::move(prior)) {
  if (strategies_.empty()) throw StructuralError("adversary model needs at least one strategy");
  if (prior_.size() != strategies_.size()) throw StructuralError("prior size does not match strategy count");
  check_distribution(prior_, "prior");
  for (const auto& s : strategies_) {
    if (!(s.behavior.scenario() == scenario_)) throw StructuralError("strategy behavior has a different scenario");
    if (s.inputs.size() != scenario_.setting_tuples()) throw StructuralError("input distribution has wrong length");
    check_distribution(s.inputs, "input distribution");
    if (!validate(s.behavior).ok()) throw StructuralError("strategy behavior is not a valid behavior");
    if (!check_nonsignalling(s.behavior).nonsignalling) throw HypothesisError("strategy behavior is signalling");
  }
}

Rational AdversaryModel::input_probability(std::size_t setting_index) const {
  if (setting_index >= scenario_.setting_tuples()) throw StructuralError("setting index out of range");
  Rational p = 0;
  for (std::size_t w = 0; w < strategies_.size(); ++w) p += prior_[w] * strategies_[w].inputs[setting_index];
  return p;
}

Rational AdversaryModel::posterior(std::size_t strategy, std::size_t setting_index) const {
  if (strategy >= strategies_.size()) throw StructuralError("strategy index out of range");
  const Rational px = input_probability(setting_index);
  if (px == 0) throw StructuralError("setting tuple has zero probability");
  Rational p = prior_[strategy] * strategies_[strategy].inputs[setting_index] / px;
  p.canonicalize();
  return p;
}

Behavior observed_behavior(const AdversaryModel& model) {
  const Scenario& sc = model.scenario();
  for (std::size_t x : expression_settings(sc)) {
    if (model.input_probability(x) == 0) {
      throw StructuralError("setting tuple " + std::to_string(x) + " of the Bell expression has zero probability");
    }
  }
  const std::size_t outs = sc.outcome_tuples();
  std::vector<Rational> probs(sc.size(), Rational(0));
  for (std::size_t x = 0; x < sc.setting_tuples(); ++x) {
    const bool reachable = model.input_probability(x) != 0;
    for (std::size_t w = 0; w < model.strategies().size(); ++w) {
      const Rational weight = reachable ? model.posterior(w, x) : model.prior()[w];
      if (weight == 0) continue;
      auto column = model.strategies()[w].behavior.column(x);
      for (std::size_t a = 0; a < outs; ++a) probs[x * outs + a] += weight * column[a];
    }
  }
  return Behavior(sc, std::move(probs));
}

std::optional<Rational> q_factor(const AdversaryModel& model, std::size_t setting_index) {
  const auto settings = expression_settings(model.scenario());
  std::optional<Rational> best;
  for (std::size_t w = 0; w < model.strategies().size(); ++w) {
    Rational lowest = model.posterior(w, settings.front());
    for (std::size_t x : settings) lowest = std::min(lowest, model.posterior(w, x));
    const Rational p = model.posterior(w, setting_index);
    if (lowest == 0) {
      if (p == 0) continue;
      return std::nullopt;
    }
    Rational ratio = p / lowest;
    ratio.canonicalize();
    if (!best || ratio > *best) best = ratio;
  }
  return best ? best : std::optional<Rational>(Rational(0));
}

std::optional<Rational> q_factor_tilde(const AdversaryModel& model, std::size_t setting_index) {
  if (setting_index >= model.scenario().setting_tuples()) throw StructuralError("setting index out of range");
  const auto settings = expression_settings(model.scenario());
  std::optional<Rational> best;
  for (const auto& s : model.strategies()) {
    Rational lowest = s.inputs[settings.front()];
    for (std::size_t x : settings) lowest = std::min(lowest, s.inputs[x]);
    const Rational& p = s.inputs[setting_index];
    if (lowest == 0) {
      if (p == 0) continue;
      return std::nullopt;
    }
    Rational ratio = p / lowest;
    ratio.canonicalize();
    if (!best || ratio > *best) best = ratio;
  }
  return best ? best : std::optional<Rational>(Rational(0));
}

VariationalCheck variational_bound(const AdversaryModel& model, std::size_t setting_index, int party,
                                   QVariant variant) {
  const Scenario& sc = model.scenario();
  if (party < 0 || party >= sc.parties()) throw StructuralError("party index out of range");
  if (setting_index >= sc.setting_tuples()) throw StructuralError("setting index out of range");
  const int d = sc.outcomes();

  VariationalCheck check;
  check.bell_value = evaluate(recursive_bkp(sc.parties(), sc.settings(), d), observed_behavior(model));

  std::vector<int> outcome(static_cast<std::size_t>(sc.parties()));
  for (std::size_t w = 0; w < model.strategies().size(); ++w) {
    const Rational pw = model.posterior(w, setting_index);
    std::vector<Rational> local(static_cast<std::size_t>(d), Rational(0));
    auto column = model.strategies()[w].behavior.column(setting_index);
    for (std::size_t a = 0; a < column.size(); ++a) {
      decode_digits(a, d, outcome);
      local[static_cast<std::size_t>(outcome[static_cast<std::size_t>(party)])] += column[a];
    }
    for (const auto& p : local) check.lhs += abs(pw * p - pw / d);
  }
  check.lhs.canonicalize();
  check.lhs_half = check.lhs / 2;

  check.q = variant == QVariant::kPosterior ? q_factor(model, setting_index) : q_factor_tilde(model, setting_index);
  if (check.q) {
    Rational rhs = make_rational((d - 1) * (d - 1) + 1, d) * *check.q * check.bell_value;
    rhs.canonicalize();
    check.rhs = rhs;
    check.rhs_half = rhs / 2;
    check.satisfied = check.lhs <= rhs;
  } else {
    check.satisfied = true;
  }
  return check;
}

double critical_epsilon(int parties) {
  if (parties < 2) throw StructuralError("critical epsilon needs N >= 2");
  const double root = std::pow(2.0, 1.0 / parties);
  return (root - 1) / (2 * (root + 1));
}

double critical_epsilon_common(int parties) {
  if (parties < 2) throw StructuralError("critical epsilon needs N >= 2");
  const double root = std::pow(2.0, 1.0 / (parties - 1));
  return (root - 1) / (2 * (root + 1));
}

const char* to_string(SourceVariant variant) {
  return variant == SourceVariant::kIndependent ? "independent" : "common";
}

int setting_rounds(int settings) {
  if (settings < 1) throw StructuralError("settings must be positive");
  int r = 0;
  while ((1LL << r) < settings) ++r;
  return r;
}

FeasibilityCurve feasibility_curve(int parties, int outcomes, double epsilon, std::span<const int> settings,
                                   const std::function<double(int)>& violation) {
  if (parties < 2) throw StructuralError("feasibility curve needs N >= 2");
  if (outcomes < 2) throw StructuralError("feasibility curve needs d >= 2");
  if (!(epsilon >= 0 && epsilon < 0.5)) throw StructuralError("epsilon must lie in [0, 1/2)");
  const double q = (1 + 2 * epsilon) / (1 - 2 * epsilon);
  const double prefactor = static_cast<double>((outcomes - 1) * (outcomes - 1) + 1) / outcomes;

  FeasibilityCurve curve;
  curve.independent_decreasing = curve.common_decreasing = true;
  double last[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int m : settings) {
    if (m < 2) throw StructuralError("feasibility curve needs M >= 2");
    const int r = setting_rounds(m);
    const double value = violation(m);
    for (auto variant : {SourceVariant::kIndependent, SourceVariant::kCommon}) {
      FeasibilityRow row;
      row.parties = parties;
      row.outcomes = outcomes;
      row.epsilon = epsilon;
      row.settings = m;
      row.rounds = r;
      row.exponent = variant == SourceVariant::kIndependent ? parties * r : 1 + (parties - 1) * r;
      row.violation = value;
      row.rhs_bound = prefactor * std::pow(q, row.exponent) * value;
      row.variant = variant;
      const int slot = variant == SourceVariant::kIndependent ? 0 : 1;
      bool& flag = slot == 0 ? curve.independent_decreasing : curve.common_decreasing;
      if (!(row.rhs_bound < last[slot])) flag = false;
      last[slot] = row.rhs_bound;
      curve.rows.push_back(row);
    }
  }
  curve.independent_below_threshold = epsilon < critical_epsilon(parties);
  curve.common_below_threshold = epsilon < critical_epsilon_common(parties);
  return curve;
}

AdversaryModel random_adversary_model(const Scenario& scenario, std::span<const Behavior> pool, std::mt19937_64& rng,
                                      const ModelGenerationOptions& options) {
  if (options.max_strategies == 0) throw StructuralError("max_strategies must be positive");
  if (options.granularity < 1) throw StructuralError("granularity must be positive");
  SVSource source{options.epsilon, 0};
  source.check();

  const int n = scenario.parties();
  const int m = scenario.settings();
  const int d = scenario.outcomes();
  const int r = setting_rounds(m);
  source.length = static_cast<std::size_t>(n * r);

  const std::size_t count = std::uniform_int_distribution<std::size_t>(1, options.max_strategies)(rng);
  std::vector<AdversaryStrategy> strategies;
  std::vector<Rational> prior;
  for (std::size_t w = 0; w < count; ++w) {
    // Devices: a mixture of up to three vertices and pool members.
    std::vector<Behavior> parts;
    const int pieces = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int p = 0; p < pieces; ++p) {
      const bool from_pool = !pool.empty() && std::uniform_int_distribution<int>(0, 1)(rng) == 1;
      if (from_pool) {
        parts.push_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
      } else {
        DeterministicAssignment assignment;
        assignment.outcome.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(m)));
        for (auto& row : assignment.outcome) {
          for (auto& o : row) o = std::uniform_int_distribution<int>(0, d - 1)(rng);
        }
        parts.push_back(deterministic_vertex(scenario, assignment));
      }
    }
    std::vector<Rational> weights(parts.size());
    Rational total = 0;
    for (auto& wt : weights) {
      wt = 1 + random_fraction(rng, options.granularity) * options.granularity;
      total += wt;
    }
    for (auto& wt : weights) {
      wt /= total;
      wt.canonicalize();
    }
    Behavior devices = mix<Rational>(parts, weights);

    // Inputs: an SV source string split into r bits per party, each party's
    // setting is its r-bit value mod M.
    const std::size_t prefixes = (std::size_t{1} << source.length) - 1;
    std::vector<Rational> one(prefixes);
    const Rational low = make_rational(1, 2) - options.epsilon;
    for (auto& p : one) p = low + 2 * options.epsilon * random_fraction(rng, options.granularity);
    const auto strings = source.string_distribution(one);
    std::vector<Rational> inputs(scenario.setting_tuples(), Rational(0));
    std::vector<int> tuple(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < strings.size(); ++s) {
      for (int k = 0; k < n; ++k) {
        const auto chunk = (s >> static_cast<std::size_t>((n - 1 - k) * r)) & ((std::size_t{1} << r) - 1);
        tuple[static_cast<std::size_t>(k)] = static_cast<int>(chunk % static_cast<std::size_t>(m));
      }
      inputs[scenario.setting_index(tuple)] += strings[s];
    }
    for (auto& v : inputs) v.canonicalize();
    strategies.push_back({std::move(devices), std::move(inputs)});
    prior.push_back(1 + random_fraction(rng, options.granularity) * options.granularity);
  }
  Rational total = sum_of(prior);
  for (auto& p : prior) {
    p /= total;
    p.canonicalize();
  }
  return AdversaryModel(scenario, std::move(strategies), std::move(prior));
}

}  // namespace monolab
