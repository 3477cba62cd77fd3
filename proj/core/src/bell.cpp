#include "monolab/bell.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "monolab/errors.hpp"

namespace monolab {
namespace {

int mod(int value, int d) {
  int r = value % d;
  return r < 0 ? r + d : r;
}

// Setting tuple of a term with idle parties at setting 0.
std::vector<int> term_settings(const ModularTerm& term) {
  std::vector<int> x(term.settings.size(), 0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (term.coeffs[k] != 0) x[k] = term.settings[k];
  }
  return x;
}

}  // namespace

BellFunctional::BellFunctional(Scenario scenario, std::vector<ModularTerm> terms, std::string name)
    : scenario_(scenario), terms_(std::move(terms)), name_(std::move(name)) {
  const auto n = static_cast<std::size_t>(scenario_.parties());
  for (const ModularTerm& t : terms_) {
    if (t.coeffs.size() != n || t.settings.size() != n) {
      throw StructuralError("term arity does not match the number of parties");
    }
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (t.coeffs[k] < -1 || t.coeffs[k] > 1) throw StructuralError("term coefficient outside {-1,0,1}");
      if (t.settings[k] < 0 || t.settings[k] >= scenario_.settings()) {
        throw StructuralError("term setting out of range");
      }
      any = any || t.coeffs[k] != 0;
    }
    if (!any) throw StructuralError("term has no nonzero coefficient");
    if (t.shift < 0 || t.shift >= scenario_.outcomes()) throw StructuralError("term shift out of range");
  }
}

std::vector<Rational> BellFunctional::dense() const {
  std::vector<Rational> coef(scenario_.size(), Rational(0));
  const int d = scenario_.outcomes();
  std::vector<int> a(static_cast<std::size_t>(scenario_.parties()));
  for (const ModularTerm& t : terms_) {
    const std::size_t base = scenario_.setting_index(term_settings(t)) * scenario_.outcome_tuples();
    for (std::size_t ai = 0; ai < scenario_.outcome_tuples(); ++ai) {
      decode_digits(ai, d, a);
      int omega = t.shift;
      for (std::size_t k = 0; k < a.size(); ++k) omega += t.coeffs[k] * a[k];
      omega = mod(omega, d);
      if (omega != 0) coef[base + ai] += t.weight * omega;
    }
  }
  return coef;
}

template <Scalar T>
T modular_mean(std::span<const T> distribution) {
  T total = 0;
  T mean = 0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    if (distribution[i] < 0) throw StructuralError("distribution has a negative entry");
    total += distribution[i];
    mean += T(static_cast<long>(i)) * distribution[i];
  }
  bool normalized;
  if constexpr (std::same_as<T, double>) {
    normalized = std::abs(total - 1.0) <= 1e-12;
  } else {
    normalized = total == 1;
  }
  if (!normalized) throw StructuralError("distribution is not normalized");
  return mean;
}

template Rational modular_mean(std::span<const Rational>);
template double modular_mean(std::span<const double>);

Fact1Residuals fact1_check(std::span<const Rational> distribution) {
  const int d = static_cast<int>(distribution.size());
  if (d < 2) throw StructuralError("distribution needs at least two outcomes");
  std::vector<Rational> neg_minus_one(distribution.size()), neg(distribution.size());
  for (int i = 0; i < d; ++i) {
    neg_minus_one[static_cast<std::size_t>(mod(-i - 1, d))] += distribution[static_cast<std::size_t>(i)];
    neg[static_cast<std::size_t>(mod(-i, d))] += distribution[static_cast<std::size_t>(i)];
  }
  Rational mean = modular_mean(distribution);
  Fact1Residuals r;
  r.first = mean + modular_mean<Rational>(neg_minus_one) - (d - 1);
  r.second = mean + modular_mean<Rational>(neg) - d * (1 - distribution[0]);
  return r;
}

BellFunctional chained_bkp(int settings, int outcomes) {
  if (settings < 2) throw StructuralError("chained functional needs M >= 2");
  if (outcomes < 2) throw StructuralError("chained functional needs d >= 2");
  std::vector<ModularTerm> terms;
  for (int alpha = 0; alpha < settings; ++alpha) {
    terms.push_back({{1, -1}, {alpha, alpha}, 0, Rational(1)});
    if (alpha + 1 < settings) {
      terms.push_back({{-1, 1}, {alpha + 1, alpha}, 0, Rational(1)});
    } else {
      terms.push_back({{-1, 1}, {0, alpha}, outcomes - 1, Rational(1)});
    }
  }
  BellFunctional f(Scenario(2, settings, outcomes), std::move(terms),
                   "I^{2," + std::to_string(settings) + "," + std::to_string(outcomes) + "}");
  f.classical_bound = Rational(outcomes - 1);
  f.ns_minimum = Rational(0);
  return f;
}

BellFunctional recursive_bkp(int parties, int settings, int outcomes) {
  if (parties < 2) throw StructuralError("recursive functional needs N >= 2");
  BellFunctional current = chained_bkp(settings, outcomes);
  const Rational inv_m = make_rational(1, settings);
  for (int n = 3; n <= parties; ++n) {
    const auto last = static_cast<std::size_t>(n - 2);
    std::vector<ModularTerm> terms;
    terms.reserve(current.terms().size() * static_cast<std::size_t>(settings));
    for (int extra = 0; extra < settings; ++extra) {
      for (const ModularTerm& t : current.terms()) {
        ModularTerm u = t;
        int c = t.coeffs[last];
        u.settings[last] += extra;
        if (u.settings[last] >= settings) {
          u.settings[last] -= settings;
          u.shift = mod(u.shift + c, outcomes);
        }
        u.coeffs.push_back(-c);
        u.settings.push_back(extra);
        u.weight *= inv_m;
        terms.push_back(std::move(u));
      }
    }
    current = BellFunctional(Scenario(n, settings, outcomes), std::move(terms),
                             "I^{" + std::to_string(n) + "," + std::to_string(settings) + "," +
                                 std::to_string(outcomes) + "}");
    current.classical_bound = Rational(outcomes - 1);
    current.ns_minimum = Rational(0);
  }
  return current;
}

BellFunctional append_idle_parties(const BellFunctional& functional, int extra) {
  if (extra < 0) throw StructuralError("negative party count");
  const Scenario& s = functional.scenario();
  std::vector<ModularTerm> terms = functional.terms();
  for (ModularTerm& t : terms) {
    t.coeffs.resize(t.coeffs.size() + static_cast<std::size_t>(extra), 0);
    t.settings.resize(t.settings.size() + static_cast<std::size_t>(extra), 0);
  }
  BellFunctional f(Scenario(s.parties() + extra, s.settings(), s.outcomes()), std::move(terms), functional.name());
  f.classical_bound = functional.classical_bound;
  f.ns_minimum = functional.ns_minimum;
  return f;
}

template <Scalar T>
T evaluate(const BellFunctional& functional, const BasicBehavior<T>& behavior) {
  const Scenario& s = functional.scenario();
  if (!(behavior.scenario() == s)) throw StructuralError("behavior scenario does not match functional");
  const int d = s.outcomes();
  std::vector<int> a(static_cast<std::size_t>(s.parties()));
  std::vector<T> dist(static_cast<std::size_t>(d));
  T total = 0;
  for (const ModularTerm& t : functional.terms()) {
    std::span<const T> col = behavior.column(s.setting_index(term_settings(t)));
    std::fill(dist.begin(), dist.end(), T(0));
    for (std::size_t ai = 0; ai < col.size(); ++ai) {
      decode_digits(ai, d, a);
      int omega = t.shift;
      for (std::size_t k = 0; k < a.size(); ++k) omega += t.coeffs[k] * a[k];
      dist[static_cast<std::size_t>(mod(omega, d))] += col[ai];
    }
    T mean = 0;
    for (int i = 1; i < d; ++i) mean += T(i) * dist[static_cast<std::size_t>(i)];
    total += from_rational<T>(t.weight) * mean;
  }
  return total;
}

template Rational evaluate(const BellFunctional&, const Behavior&);
template double evaluate(const BellFunctional&, const FloatBehavior&);

Rational evaluate_dense(const BellFunctional& functional, const Behavior& behavior) {
  if (!(behavior.scenario() == functional.scenario())) {
    throw StructuralError("behavior scenario does not match functional");
  }
  std::vector<Rational> coef = functional.dense();
  Rational total = 0;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (sgn(coef[i]) != 0) total += coef[i] * behavior.values()[i];
  }
  return total;
}

Rational evaluate_vertex(const BellFunctional& functional, const DeterministicAssignment& assignment) {
  const Scenario& s = functional.scenario();
  if (assignment.outcome.size() != static_cast<std::size_t>(s.parties())) {
    throw StructuralError("assignment arity does not match scenario");
  }
  Rational total = 0;
  for (const ModularTerm& t : functional.terms()) {
    int omega = t.shift;
    for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
      if (t.coeffs[k] != 0) omega += t.coeffs[k] * assignment.outcome[k].at(static_cast<std::size_t>(t.settings[k]));
    }
    omega = mod(omega, s.outcomes());
    if (omega != 0) total += t.weight * omega;
  }
  return total;
}

ClassicalMinimum classical_minimum(const BellFunctional& functional) {
  ClassicalMinimum best;
  bool first = true;
  for_each_deterministic_assignment(functional.scenario(), [&](const DeterministicAssignment& a) {
    Rational v = evaluate_vertex(functional, a);
    ++best.vertices;
    if (first || v < best.value) {
      best.value = v;
      best.argmin = a;
      first = false;
    }
  });
  return best;
}

bool is_party_swap_invariant(const BellFunctional& functional, int first, int second) {
  const Scenario& s = functional.scenario();
  if (first < 0 || second < 0 || first >= s.parties() || second >= s.parties()) {
    throw StructuralError("party index out of range");
  }
  std::vector<Rational> coef = functional.dense();
  std::vector<int> x(static_cast<std::size_t>(s.parties()));
  std::vector<int> a(x.size());
  for (std::size_t xi = 0; xi < s.setting_tuples(); ++xi) {
    decode_digits(xi, s.settings(), x);
    std::swap(x[static_cast<std::size_t>(first)], x[static_cast<std::size_t>(second)]);
    const std::size_t sx = s.setting_index(x);
    for (std::size_t ai = 0; ai < s.outcome_tuples(); ++ai) {
      decode_digits(ai, s.outcomes(), a);
      std::swap(a[static_cast<std::size_t>(first)], a[static_cast<std::size_t>(second)]);
      if (coef[xi * s.outcome_tuples() + ai] != coef[sx * s.outcome_tuples() + s.outcome_index(a)]) return false;
    }
  }
  return true;
}

bool symmetry_check(int parties, int settings, int outcomes) {
  if (parties < 3) throw StructuralError("party swap symmetry needs N >= 3");
  return is_party_swap_invariant(recursive_bkp(parties, settings, outcomes), parties - 1, parties - 3);
}

std::vector<std::size_t> bell_setting_indices(const BellFunctional& functional) {
  std::set<std::size_t> seen;
  for (const ModularTerm& t : functional.terms()) {
    seen.insert(functional.scenario().setting_index(term_settings(t)));
  }
  return {seen.begin(), seen.end()};
}

}  // namespace monolab
