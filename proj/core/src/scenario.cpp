#include "monolab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "monolab/errors.hpp"

namespace monolab {
namespace {

std::size_t checked_pow(std::size_t base, int exponent, std::size_t cap, const char* what) {
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > cap / base) {
      throw CapacityError(std::string("scenario too large: ") + what + " exceeds size cap");
    }
    result *= base;
  }
  return result;
}

template <Scalar T>
bool within(const T& value, double tol) {
  if constexpr (std::same_as<T, double>) {
    return (value < 0 ? -value : value) <= tol;
  } else {
    (void)tol;
    return sgn(value) == 0;
  }
}

template <Scalar T>
T sum_of(std::span<const T> values) {
  T total = 0;
  for (const T& v : values) total += v;
  return total;
}

}  // namespace

std::size_t size_cap() {
  if (const char* env = std::getenv("MONOGAMY_LAB_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultSizeCap;
}

Scenario::Scenario(int parties, int settings, int outcomes, std::size_t cap)
    : parties_(parties), settings_(settings), outcomes_(outcomes) {
  if (parties < 1) throw StructuralError("scenario needs N >= 1 parties");
  if (settings < 1) throw StructuralError("scenario needs M >= 1 settings");
  if (outcomes < 2) throw StructuralError("scenario needs d >= 2 outcomes");
  setting_tuples_ = checked_pow(static_cast<std::size_t>(settings), parties, cap, "M^N");
  outcome_tuples_ = checked_pow(static_cast<std::size_t>(outcomes), parties, cap, "d^N");
  if (setting_tuples_ > cap / outcome_tuples_) {
    throw CapacityError("scenario too large: d^N * M^N = " +
                        std::to_string(static_cast<double>(setting_tuples_) *
                                       static_cast<double>(outcome_tuples_)) +
                        " exceeds size cap " + std::to_string(cap));
  }
}

void decode_digits(std::size_t value, int base, std::span<int> digits) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    digits[i] = static_cast<int>(value % static_cast<std::size_t>(base));
    value /= static_cast<std::size_t>(base);
  }
}

std::size_t encode_digits(std::span<const int> digits, int base) {
  std::size_t value = 0;
  for (int digit : digits) value = value * static_cast<std::size_t>(base) + static_cast<std::size_t>(digit);
  return value;
}

std::size_t Scenario::setting_index(std::span<const int> settings) const {
  if (settings.size() != static_cast<std::size_t>(parties_)) {
    throw StructuralError("setting tuple has wrong length");
  }
  for (int x : settings) {
    if (x < 0 || x >= settings_) throw StructuralError("setting out of range");
  }
  return encode_digits(settings, settings_);
}

std::size_t Scenario::outcome_index(std::span<const int> outcomes) const {
  if (outcomes.size() != static_cast<std::size_t>(parties_)) {
    throw StructuralError("outcome tuple has wrong length");
  }
  for (int a : outcomes) {
    if (a < 0 || a >= outcomes_) throw StructuralError("outcome out of range");
  }
  return encode_digits(outcomes, outcomes_);
}

std::vector<int> Scenario::setting_tuple(std::size_t setting_index) const {
  std::vector<int> digits(static_cast<std::size_t>(parties_));
  decode_digits(setting_index, settings_, digits);
  return digits;
}

std::vector<int> Scenario::outcome_tuple(std::size_t outcome_index) const {
  std::vector<int> digits(static_cast<std::size_t>(parties_));
  decode_digits(outcome_index, outcomes_, digits);
  return digits;
}

template <Scalar T>
BasicBehavior<T>::BasicBehavior(Scenario scenario, std::vector<T> probs)
    : scenario_(scenario), probs_(std::move(probs)) {
  if (probs_.size() != scenario_.size()) {
    throw StructuralError("behavior has " + std::to_string(probs_.size()) + " entries, scenario needs " +
                          std::to_string(scenario_.size()));
  }
}

template <Scalar T>
BasicBehavior<T> BasicBehavior<T>::uniform(const Scenario& scenario) {
  T value;
  if constexpr (std::same_as<T, double>) {
    value = 1.0 / static_cast<double>(scenario.outcome_tuples());
  } else {
    value = Rational(1, static_cast<unsigned long>(scenario.outcome_tuples()));
  }
  return BasicBehavior(scenario, std::vector<T>(scenario.size(), value));
}

FloatBehavior to_float(const Behavior& behavior) {
  std::vector<double> values;
  values.reserve(behavior.values().size());
  for (const Rational& v : behavior.values()) values.push_back(v.get_d());
  return FloatBehavior(behavior.scenario(), std::move(values));
}

template <Scalar T>
ValidationReport<T> validate(const BasicBehavior<T>& behavior, double tol) {
  ValidationReport<T> report;
  const Scenario& s = behavior.scenario();
  for (std::size_t x = 0; x < s.setting_tuples(); ++x) {
    std::span<const T> column = behavior.column(x);
    for (std::size_t a = 0; a < column.size(); ++a) {
      const T& p = column[a];
      bool negative;
      if constexpr (std::same_as<T, double>) {
        negative = p < -tol;
      } else {
        negative = sgn(p) < 0;
      }
      if (negative) report.violations.push_back({ViolationKind::kNegative, x, a, p});
    }
    T excess = sum_of(column) - T(1);
    if (!within(excess, tol)) report.violations.push_back({ViolationKind::kNormalization, x, 0, excess});
  }
  return report;
}

template <Scalar T>
SignallingReport<T> check_nonsignalling(const BasicBehavior<T>& behavior, double tol) {
  const Scenario& s = behavior.scenario();
  const int n = s.parties();
  const int m = s.settings();
  const int d = s.outcomes();
  T worst = 0;

  std::vector<int> x(static_cast<std::size_t>(n));
  std::vector<int> a(static_cast<std::size_t>(n));
  for (unsigned subset = 1; subset + 1 < (1u << n); ++subset) {
    std::vector<int> inside;
    std::vector<int> outside;
    for (int k = 0; k < n; ++k) ((subset >> k) & 1u ? inside : outside).push_back(k);

    std::size_t in_settings = 1, out_settings = 1, in_outcomes = 1;
    for (std::size_t i = 0; i < inside.size(); ++i) {
      in_settings *= static_cast<std::size_t>(m);
      in_outcomes *= static_cast<std::size_t>(d);
    }
    for (std::size_t i = 0; i < outside.size(); ++i) out_settings *= static_cast<std::size_t>(m);

    // marg[(xs * out_settings + xc) * in_outcomes + as]
    std::vector<T> marg(in_settings * out_settings * in_outcomes, T(0));
    for (std::size_t xi = 0; xi < s.setting_tuples(); ++xi) {
      decode_digits(xi, m, x);
      std::size_t xs = 0, xc = 0;
      for (int k : inside) xs = xs * static_cast<std::size_t>(m) + static_cast<std::size_t>(x[static_cast<std::size_t>(k)]);
      for (int k : outside) xc = xc * static_cast<std::size_t>(m) + static_cast<std::size_t>(x[static_cast<std::size_t>(k)]);
      std::span<const T> column = behavior.column(xi);
      for (std::size_t ai = 0; ai < column.size(); ++ai) {
        decode_digits(ai, d, a);
        std::size_t as = 0;
        for (int k : inside) as = as * static_cast<std::size_t>(d) + static_cast<std::size_t>(a[static_cast<std::size_t>(k)]);
        marg[(xs * out_settings + xc) * in_outcomes + as] += column[ai];
      }
    }
    for (std::size_t xs = 0; xs < in_settings; ++xs) {
      for (std::size_t as = 0; as < in_outcomes; ++as) {
        T lo = marg[(xs * out_settings) * in_outcomes + as];
        T hi = lo;
        for (std::size_t xc = 1; xc < out_settings; ++xc) {
          const T& v = marg[(xs * out_settings + xc) * in_outcomes + as];
          if (v < lo) lo = v;
          if (v > hi) hi = v;
        }
        T spread = hi - lo;
        if (spread > worst) worst = spread;
      }
    }
  }
  bool ok;
  if constexpr (std::same_as<T, double>) {
    ok = worst <= tol;
  } else {
    ok = sgn(worst) == 0;
  }
  return {ok, worst};
}

template <Scalar T>
Marginal<T> marginal(const BasicBehavior<T>& behavior, std::span<const int> parties,
                     std::span<const int> settings) {
  const Scenario& s = behavior.scenario();
  const int n = s.parties();
  if (parties.empty()) throw StructuralError("marginal needs a nonempty party subset");
  if (parties.size() != settings.size()) throw StructuralError("marginal: one setting per party required");
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < parties.size(); ++i) {
    int k = parties[i];
    if (k < 0 || k >= n || used[static_cast<std::size_t>(k)]) {
      throw StructuralError("marginal: invalid or repeated party index");
    }
    if (settings[i] < 0 || settings[i] >= s.settings()) throw StructuralError("marginal: setting out of range");
    used[static_cast<std::size_t>(k)] = 1;
  }
  std::vector<int> outside;
  for (int k = 0; k < n; ++k) {
    if (!used[static_cast<std::size_t>(k)]) outside.push_back(k);
  }

  const int d = s.outcomes();
  std::size_t in_outcomes = 1;
  for (std::size_t i = 0; i < parties.size(); ++i) in_outcomes *= static_cast<std::size_t>(d);
  std::size_t out_settings = 1;
  for (std::size_t i = 0; i < outside.size(); ++i) out_settings *= static_cast<std::size_t>(s.settings());

  Marginal<T> result;
  result.parties.assign(parties.begin(), parties.end());
  std::vector<int> x(static_cast<std::size_t>(n));
  std::vector<int> xc_digits(outside.size());
  std::vector<int> a(static_cast<std::size_t>(n));
  std::vector<T> reference;
  for (std::size_t xc = 0; xc < out_settings; ++xc) {
    decode_digits(xc, s.settings(), xc_digits);
    for (std::size_t i = 0; i < parties.size(); ++i) x[static_cast<std::size_t>(parties[i])] = settings[i];
    for (std::size_t i = 0; i < outside.size(); ++i) x[static_cast<std::size_t>(outside[i])] = xc_digits[i];
    std::span<const T> column = behavior.column(encode_digits(x, s.settings()));
    std::vector<T> probs(in_outcomes, T(0));
    for (std::size_t ai = 0; ai < column.size(); ++ai) {
      decode_digits(ai, d, a);
      std::size_t as = 0;
      for (int k : parties) as = as * static_cast<std::size_t>(d) + static_cast<std::size_t>(a[static_cast<std::size_t>(k)]);
      probs[as] += column[ai];
    }
    if (xc == 0) {
      reference = std::move(probs);
    } else if (!result.complement_dependent && probs != reference) {
      result.complement_dependent = true;
    }
  }
  result.probs = std::move(reference);
  return result;
}

Behavior deterministic_vertex(const Scenario& scenario, const DeterministicAssignment& assignment) {
  const int n = scenario.parties();
  if (assignment.outcome.size() != static_cast<std::size_t>(n)) {
    throw StructuralError("deterministic assignment must cover every party");
  }
  for (const auto& row : assignment.outcome) {
    if (row.size() != static_cast<std::size_t>(scenario.settings())) {
      throw StructuralError("deterministic assignment must cover every setting");
    }
    for (int o : row) {
      if (o < 0 || o >= scenario.outcomes()) throw StructuralError("deterministic assignment outcome out of range");
    }
  }
  std::vector<Rational> probs(scenario.size(), Rational(0));
  std::vector<int> a(static_cast<std::size_t>(n));
  for (std::size_t xi = 0; xi < scenario.setting_tuples(); ++xi) {
    std::vector<int> x = scenario.setting_tuple(xi);
    for (int k = 0; k < n; ++k) {
      a[static_cast<std::size_t>(k)] =
          assignment.outcome[static_cast<std::size_t>(k)][static_cast<std::size_t>(x[static_cast<std::size_t>(k)])];
    }
    probs[xi * scenario.outcome_tuples() + scenario.outcome_index(a)] = 1;
  }
  return Behavior(scenario, std::move(probs));
}

void for_each_deterministic_assignment(
    const Scenario& scenario, const std::function<void(const DeterministicAssignment&)>& visit) {
  const std::size_t n = static_cast<std::size_t>(scenario.parties());
  const std::size_t m = static_cast<std::size_t>(scenario.settings());
  const int d = scenario.outcomes();
  DeterministicAssignment assignment;
  assignment.outcome.assign(n, std::vector<int>(m, 0));
  std::vector<int> flat(n * m, 0);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t x = 0; x < m; ++x) assignment.outcome[k][x] = flat[k * m + x];
    }
    visit(assignment);
    std::size_t pos = flat.size();
    while (pos > 0) {
      --pos;
      if (++flat[pos] < d) break;
      flat[pos] = 0;
      if (pos == 0) return;
    }
    if (flat.empty()) return;
  }
}

template <Scalar T>
BasicBehavior<T> mix(std::span<const BasicBehavior<T>> behaviors, std::span<const T> weights) {
  if (behaviors.empty()) throw StructuralError("mix needs at least one behavior");
  if (behaviors.size() != weights.size()) throw StructuralError("mix: one weight per behavior required");
  const Scenario& s = behaviors.front().scenario();
  T total = 0;
  for (std::size_t i = 0; i < behaviors.size(); ++i) {
    if (!(behaviors[i].scenario() == s)) throw StructuralError("mix: scenario mismatch");
    if (weights[i] < 0) throw StructuralError("mix: negative weight");
    total += weights[i];
  }
  if constexpr (std::same_as<T, double>) {
    if (std::abs(total - 1.0) > 1e-12) throw StructuralError("mix: weights must sum to 1");
  } else {
    if (total != 1) throw StructuralError("mix: weights must sum to 1");
  }
  std::vector<T> probs(s.size(), T(0));
  for (std::size_t i = 0; i < behaviors.size(); ++i) {
    if (is_zero(weights[i])) continue;
    std::span<const T> v = behaviors[i].values();
    for (std::size_t j = 0; j < probs.size(); ++j) probs[j] += weights[i] * v[j];
  }
  return BasicBehavior<T>(s, std::move(probs));
}

template <Scalar T>
BasicBehavior<T> product(const BasicBehavior<T>& first, const BasicBehavior<T>& second) {
  const Scenario& s1 = first.scenario();
  const Scenario& s2 = second.scenario();
  if (s1.settings() != s2.settings() || s1.outcomes() != s2.outcomes()) {
    throw StructuralError("product: factors must share M and d");
  }
  Scenario joint(s1.parties() + s2.parties(), s1.settings(), s1.outcomes());
  std::vector<T> probs(joint.size());
  // Party-major digit order makes (x1, x2) -> x1 * M^N2 + x2 and likewise for outcomes.
  for (std::size_t x1 = 0; x1 < s1.setting_tuples(); ++x1) {
    for (std::size_t x2 = 0; x2 < s2.setting_tuples(); ++x2) {
      std::size_t x = x1 * s2.setting_tuples() + x2;
      std::span<const T> c1 = first.column(x1);
      std::span<const T> c2 = second.column(x2);
      for (std::size_t a1 = 0; a1 < c1.size(); ++a1) {
        for (std::size_t a2 = 0; a2 < c2.size(); ++a2) {
          probs[x * joint.outcome_tuples() + a1 * s2.outcome_tuples() + a2] = c1[a1] * c2[a2];
        }
      }
    }
  }
  return BasicBehavior<T>(joint, std::move(probs));
}

template class BasicBehavior<Rational>;
template class BasicBehavior<double>;

template ValidationReport<Rational> validate(const Behavior&, double);
template ValidationReport<double> validate(const FloatBehavior&, double);
template SignallingReport<Rational> check_nonsignalling(const Behavior&, double);
template SignallingReport<double> check_nonsignalling(const FloatBehavior&, double);
template Marginal<Rational> marginal(const Behavior&, std::span<const int>, std::span<const int>);
template Marginal<double> marginal(const FloatBehavior&, std::span<const int>, std::span<const int>);
template Behavior mix(std::span<const Behavior>, std::span<const Rational>);
template FloatBehavior mix(std::span<const FloatBehavior>, std::span<const double>);
template Behavior product(const Behavior&, const Behavior&);
template FloatBehavior product(const FloatBehavior&, const FloatBehavior&);

}  // namespace monolab
