#include "monolab/monogamy.hpp"

#include <algorithm>
#include <string>

#include "monolab/errors.hpp"
#include "monolab/parallel.hpp"

namespace monolab {
namespace {

void require_nonsignalling(const Behavior& behavior) {
  if (!check_nonsignalling(behavior).nonsignalling) {
    throw HypothesisError("monogamy relations require a no-signalling behavior");
  }
}

void check_indices(const Scenario& scenario, int party, int party_setting, int outsider_setting) {
  if (scenario.parties() < 3) throw StructuralError("monogamy relations need at least three parties");
  if (party < 0 || party >= scenario.parties() - 1) throw StructuralError("party index out of range");
  if (party_setting < 0 || party_setting >= scenario.settings() || outsider_setting < 0 ||
      outsider_setting >= scenario.settings()) {
    throw StructuralError("setting index out of range");
  }
}

template <Scalar T>
void require_nonnegative(const T& value) {
  if (value < 0) throw StructuralError("Bell value must be nonnegative");
}

Rational pow_int(int base, int exponent) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exponent));
  return Rational(r);
}

}  // namespace

BellFunctional group_functional(const Scenario& scenario) {
  if (scenario.parties() < 3) throw StructuralError("monogamy relations need at least three parties");
  return append_idle_parties(recursive_bkp(scenario.parties() - 1, scenario.settings(), scenario.outcomes()), 1);
}

BellFunctional monogamy_functional(const Scenario& scenario, int party, int party_setting, int outsider_setting) {
  check_indices(scenario, party, party_setting, outsider_setting);
  BellFunctional group = group_functional(scenario);
  std::vector<ModularTerm> terms = group.terms();
  const auto n = static_cast<std::size_t>(scenario.parties());
  ModularTerm forward{std::vector<int>(n, 0), std::vector<int>(n, 0), 0, Rational(1)};
  forward.coeffs[static_cast<std::size_t>(party)] = 1;
  forward.coeffs[n - 1] = -1;
  forward.settings[static_cast<std::size_t>(party)] = party_setting;
  forward.settings[n - 1] = outsider_setting;
  ModularTerm backward = forward;
  backward.coeffs[static_cast<std::size_t>(party)] = -1;
  backward.coeffs[n - 1] = 1;
  terms.push_back(std::move(forward));
  terms.push_back(std::move(backward));
  BellFunctional f(scenario, std::move(terms), "monogamy");
  f.classical_bound = Rational(scenario.outcomes() - 1);
  return f;
}

Rational monogamy_lhs_general(const Behavior& behavior, int party, int party_setting, int outsider_setting) {
  check_indices(behavior.scenario(), party, party_setting, outsider_setting);
  require_nonsignalling(behavior);
  return evaluate(monogamy_functional(behavior.scenario(), party, party_setting, outsider_setting), behavior);
}

Rational monogamy_lhs_tripartite(const Behavior& behavior, int party, int i, int j) {
  if (behavior.scenario().parties() != 3) throw StructuralError("tripartite relation needs a three-party behavior");
  return monogamy_lhs_general(behavior, party, i, j);
}

std::vector<Rational> agreement_objective(const Scenario& scenario, int party, int party_setting,
                                          int outsider_setting, int shift) {
  check_indices(scenario, party, party_setting, outsider_setting);
  const int d = scenario.outcomes();
  if (shift < 0 || shift >= d) throw StructuralError("shift out of range");
  std::vector<Rational> coef(scenario.size(), Rational(0));
  const auto n = static_cast<std::size_t>(scenario.parties());
  std::vector<int> x(n, 0);
  x[static_cast<std::size_t>(party)] = party_setting;
  x[n - 1] = outsider_setting;
  const std::size_t base = scenario.setting_index(x) * scenario.outcome_tuples();
  std::vector<int> a(n);
  for (std::size_t ai = 0; ai < scenario.outcome_tuples(); ++ai) {
    decode_digits(ai, d, a);
    if (a[static_cast<std::size_t>(party)] == (a[n - 1] + shift) % d) coef[base + ai] = 1;
  }
  return coef;
}

AgreementCheck agreement_probability(const Behavior& behavior, int party, int party_setting, int outsider_setting,
                                     int shift) {
  const Scenario& s = behavior.scenario();
  check_indices(s, party, party_setting, outsider_setting);
  require_nonsignalling(behavior);
  const int d = s.outcomes();
  if (shift < 0 || shift >= d) throw StructuralError("shift out of range");
  const int parties[] = {party, s.parties() - 1};
  const int settings[] = {party_setting, outsider_setting};
  Marginal<Rational> pair = marginal(behavior, parties, settings);
  AgreementCheck check;
  for (int c = 0; c < d; ++c) {
    check.probability += pair.probs[static_cast<std::size_t>(((c + shift) % d) * d + c)];
  }
  check.bell_value = evaluate(group_functional(s), behavior);
  check.holds = check.bell_value + 1 >= d * check.probability;
  return check;
}

template <Scalar T>
T guessing_bound_unclamped(const T& bell_value, int outcomes) {
  require_nonnegative(bell_value);
  if (outcomes < 2) throw StructuralError("need d >= 2");
  return T(1 + bell_value) / T(outcomes);
}

template <Scalar T>
T guessing_bound_prior_unclamped(const T& bell_value, int parties, int outcomes) {
  require_nonnegative(bell_value);
  if (outcomes < 2 || parties < 2) throw StructuralError("need d >= 2 and N >= 2");
  T scale = from_rational<T>(pow_int(outcomes, parties)) * T(parties - 1) / T(4);
  return T(1 + scale * bell_value) / T(outcomes);
}

template <Scalar T>
T guessing_bound(const T& bell_value, int outcomes) {
  return std::min(T(1), guessing_bound_unclamped(bell_value, outcomes));
}

template <Scalar T>
T guessing_bound_prior(const T& bell_value, int parties, int outcomes) {
  return std::min(T(1), guessing_bound_prior_unclamped(bell_value, parties, outcomes));
}

template Rational guessing_bound(const Rational&, int);
template double guessing_bound(const double&, int);
template Rational guessing_bound_prior(const Rational&, int, int);
template double guessing_bound_prior(const double&, int, int);
template Rational guessing_bound_unclamped(const Rational&, int);
template double guessing_bound_unclamped(const double&, int);
template Rational guessing_bound_prior_unclamped(const Rational&, int, int);
template double guessing_bound_prior_unclamped(const double&, int, int);

Rational prior_bound_saturation(int parties, int outcomes) {
  if (outcomes < 2 || parties < 2) throw StructuralError("need d >= 2 and N >= 2");
  return Rational(4 * (outcomes - 1)) / (pow_int(outcomes, parties) * (parties - 1));
}

bool MonogamyReport::all_satisfied() const noexcept {
  return std::all_of(records.begin(), records.end(), [](const MonogamyRecord& r) { return r.satisfied; });
}

MonogamyReport monogamy_report(const Behavior& behavior) {
  const Scenario& s = behavior.scenario();
  if (s.parties() < 3) throw StructuralError("monogamy relations need at least three parties");
  require_nonsignalling(behavior);
  const int d = s.outcomes();
  const Rational bell_value = evaluate(group_functional(s), behavior);
  MonogamyReport report;
  for (int k = 0; k + 1 < s.parties(); ++k) {
    for (int xk = 0; xk < s.settings(); ++xk) {
      for (int xo = 0; xo < s.settings(); ++xo) {
        MonogamyRecord sum;
        sum.form = RelationForm::kSum;
        sum.party = k;
        sum.party_setting = xk;
        sum.outsider_setting = xo;
        sum.bell_value = bell_value;
        sum.lhs = evaluate(monogamy_functional(s, k, xk, xo), behavior);
        sum.bound = d - 1;
        sum.slack = sum.lhs - sum.bound;
        sum.satisfied = sgn(sum.slack) >= 0;
        report.records.push_back(sum);
        for (int m = 0; m < d; ++m) {
          AgreementCheck a = agreement_probability(behavior, k, xk, xo, m);
          MonogamyRecord rec;
          rec.form = RelationForm::kAgreement;
          rec.party = k;
          rec.party_setting = xk;
          rec.outsider_setting = xo;
          rec.shift = m;
          rec.bell_value = bell_value;
          rec.lhs = bell_value + 1;
          rec.bound = d * a.probability;
          rec.slack = rec.lhs - rec.bound;
          rec.satisfied = sgn(rec.slack) >= 0;
          report.records.push_back(std::move(rec));
        }
      }
    }
  }
  return report;
}

std::vector<Rational> default_tightness_grid(int outcomes) {
  if (outcomes < 2) throw StructuralError("need d >= 2");
  const Rational top(outcomes - 1);
  return {Rational(0), top / 4, top / 2, 3 * top / 4, top};
}

std::vector<TightnessRow> tightness_scan(const Scenario& scenario, int party, int party_setting,
                                         int outsider_setting, const std::vector<Rational>& grid, unsigned jobs,
                                         const SolveOptions& options) {
  check_indices(scenario, party, party_setting, outsider_setting);
  const int d = scenario.outcomes();
  const std::vector<Rational> objective = agreement_objective(scenario, party, party_setting, outsider_setting);
  const std::vector<Rational> bell = group_functional(scenario).dense();
  Constraint level;
  level.relation = Relation::kEqual;
  level.label = "bell value";
  for (std::size_t i = 0; i < bell.size(); ++i) {
    if (sgn(bell[i]) != 0) level.terms.push_back({i, bell[i]});
  }

  std::vector<TightnessRow> rows(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    TightnessRow& row = rows[i];
    row.target = grid[i];
    row.bound = (1 + grid[i]) / d;
    if (sgn(grid[i]) < 0 || grid[i] > d - 1) return;
    Constraint c = level;
    c.rhs = grid[i];
    NsOptimum opt = optimize_over_ns(scenario, objective, Sense::kMaximize, std::span<const Constraint>(&c, 1), options);
    if (opt.solution.status != LPStatus::kOptimal) return;
    row.feasible = true;
    row.lp_max = opt.solution.value;
    row.tight = opt.solution.value == row.bound;
  });
  return rows;
}

}  // namespace monolab
