#include "monolab/quantum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "monolab/errors.hpp"
#include "monolab/monogamy.hpp"

namespace monolab {
namespace {

using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw HypothesisError("alpha must be at least 1");
}

std::size_t qubit_bit(int qubits, int qubit) { return std::size_t{1} << static_cast<unsigned>(qubits - 1 - qubit); }

void check_qubit(const RealPureState& state, int qubit) {
  if (qubit < 0 || qubit >= state.qubits()) throw StructuralError("qubit index out of range");
}

// Applies a real 2x2 operator (row-major) to one qubit.
VectorXd apply(const VectorXd& psi, int qubits, int qubit, const std::array<double, 4>& m) {
  VectorXd out(psi.size());
  const std::size_t bit = qubit_bit(qubits, qubit);
  for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i) {
    if (i & bit) continue;
    const std::size_t j = i | bit;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    out[ii] = m[0] * psi[ii] + m[1] * psi[jj];
    out[jj] = m[2] * psi[ii] + m[3] * psi[jj];
  }
  return out;
}

VectorXd as_vector(const RealPureState& state) {
  auto amps = state.amplitudes();
  return Eigen::Map<const VectorXd>(amps.data(), static_cast<Eigen::Index>(amps.size()));
}

constexpr std::array<double, 4> kSigmaX{0, 1, 1, 0};
constexpr std::array<double, 4> kSigmaZ{1, 0, 0, -1};

Eigen::Vector2d vec(const std::array<double, 2>& a) { return {a[0], a[1]}; }

Eigen::Matrix2d mat(const CorrelationMatrix& t) {
  Eigen::Matrix2d m;
  m << t.entries[0][0], t.entries[0][1], t.entries[1][0], t.entries[1][1];
  return m;
}

int mod(int value, int d) {
  int r = value % d;
  return r < 0 ? r + d : r;
}

// P([a - b] = k) for one setting pair.
void difference_distribution(int d, const PhaseVector& alice, const PhaseVector& bob, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(d), 0.0);
  for (int k = 0; k < d; ++k) {
    std::complex<double> amp = 0;
    for (int j = 0; j < d; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      amp += std::polar(1.0, 2 * kPi * j * k / d + alice[jj] + bob[jj]);
    }
    out[static_cast<std::size_t>(k)] = std::norm(amp) / (static_cast<double>(d) * d);
  }
}

void check_phases(int settings, int outcomes, const std::vector<PhaseVector>& alice, const std::vector<PhaseVector>& bob) {
  auto ok = [&](const std::vector<PhaseVector>& p) {
    return p.size() == static_cast<std::size_t>(settings) &&
           std::all_of(p.begin(), p.end(), [&](const PhaseVector& v) { return v.size() == static_cast<std::size_t>(outcomes); });
  };
  if (!ok(alice) || !ok(bob)) throw StructuralError("phase vectors do not match (M, d)");
}

// Evenly spaced linear phases with Bob offset by `delta`.
void chain_phases(int settings, int outcomes, double delta, std::vector<PhaseVector>& alice, std::vector<PhaseVector>& bob) {
  alice.assign(static_cast<std::size_t>(settings), PhaseVector(static_cast<std::size_t>(outcomes)));
  bob = alice;
  const double step = 2 * kPi / (static_cast<double>(outcomes) * settings);
  for (int x = 0; x < settings; ++x) {
    for (int j = 0; j < outcomes; ++j) {
      alice[static_cast<std::size_t>(x)][static_cast<std::size_t>(j)] = -j * step * x;
      bob[static_cast<std::size_t>(x)][static_cast<std::size_t>(j)] = j * (step * x + delta);
    }
  }
}

}  // namespace

RealPureState::RealPureState(int qubits, std::vector<double> amplitudes)
    : qubits_(qubits), amplitudes_(std::move(amplitudes)) {
  if (qubits < 1 || qubits > 20) throw StructuralError("qubit count out of range");
  if (amplitudes_.size() != (std::size_t{1} << static_cast<unsigned>(qubits))) {
    throw StructuralError("amplitude count must be 2^qubits");
  }
  double norm = 0;
  for (double a : amplitudes_) norm += a * a;
  if (std::abs(norm - 1.0) > 1e-12) throw StructuralError("state is not normalized");
}

RealPureState RealPureState::normalized(int qubits, std::vector<double> amplitudes) {
  double norm = 0;
  for (double a : amplitudes) norm += a * a;
  if (norm == 0) throw StructuralError("cannot normalize the zero vector");
  norm = std::sqrt(norm);
  for (double& a : amplitudes) a /= norm;
  return RealPureState(qubits, std::move(amplitudes));
}

RealPureState random_real_state(int qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> amps(std::size_t{1} << static_cast<unsigned>(qubits));
  for (double& a : amps) a = gauss(rng);
  return RealPureState::normalized(qubits, std::move(amps));
}

std::array<double, 2> PlaneObservable::direction() const { return {std::sin(angle), std::cos(angle)}; }

std::array<double, 4> PlaneObservable::matrix() const {
  const double s = std::sin(angle), c = std::cos(angle);
  return {c, s, s, -c};
}

PlaneObservable observable_along(double x, double z) { return {std::atan2(x, z)}; }

std::array<double, 2> CorrelationMatrix::eigenvalues() const {
  Eigen::Matrix2d m = mat(*this);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m * m.transpose(), Eigen::EigenvaluesOnly);
  return {std::max(0.0, solver.eigenvalues()[1]), std::max(0.0, solver.eigenvalues()[0])};
}

double CorrelationMatrix::correlation(const PlaneObservable& a, const PlaneObservable& b) const {
  return vec(a.direction()).dot(mat(*this) * vec(b.direction()));
}

CorrelationMatrix correlation_matrix(const RealPureState& state, int first, int second) {
  check_qubit(state, first);
  check_qubit(state, second);
  if (first == second) throw StructuralError("correlation matrix needs two distinct qubits");
  const VectorXd psi = as_vector(state);
  CorrelationMatrix t;
  const std::array<const std::array<double, 4>*, 2> paulis{&kSigmaX, &kSigmaZ};
  for (int u = 0; u < 2; ++u) {
    VectorXd left = apply(psi, state.qubits(), first, *paulis[static_cast<std::size_t>(u)]);
    for (int v = 0; v < 2; ++v) {
      VectorXd both = apply(left, state.qubits(), second, *paulis[static_cast<std::size_t>(v)]);
      t.entries[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = psi.dot(both);
    }
  }
  return t;
}

double expectation(const RealPureState& state, int first, const PlaneObservable& a, int second,
                   const PlaneObservable& b) {
  check_qubit(state, first);
  check_qubit(state, second);
  if (first == second) throw StructuralError("two-body expectation needs distinct qubits");
  const VectorXd psi = as_vector(state);
  VectorXd out = apply(apply(psi, state.qubits(), first, a.matrix()), state.qubits(), second, b.matrix());
  return psi.dot(out);
}

double expectation(const RealPureState& state, int qubit, const PlaneObservable& a) {
  check_qubit(state, qubit);
  const VectorXd psi = as_vector(state);
  return psi.dot(apply(psi, state.qubits(), qubit, a.matrix()));
}

double alpha_chsh_value(const CorrelationMatrix& t, const std::array<PlaneObservable, 2>& a,
                        const std::array<PlaneObservable, 2>& b, double alpha) {
  require_alpha(alpha);
  return alpha * (t.correlation(a[0], b[0]) + t.correlation(a[0], b[1])) + t.correlation(a[1], b[0]) -
         t.correlation(a[1], b[1]);
}

double alpha_chsh_value(const RealPureState& state, const std::array<PlaneObservable, 2>& a,
                        const std::array<PlaneObservable, 2>& b, double alpha, std::pair<int, int> qubits) {
  require_alpha(alpha);
  auto e = [&](const PlaneObservable& x, const PlaneObservable& y) {
    return expectation(state, qubits.first, x, qubits.second, y);
  };
  return alpha * (e(a[0], b[0]) + e(a[0], b[1])) + e(a[1], b[0]) - e(a[1], b[1]);
}

double alpha_chsh_max(const CorrelationMatrix& t, double alpha) {
  require_alpha(alpha);
  auto l = t.eigenvalues();
  return 2 * std::sqrt(alpha * alpha * l[0] + l[1]);
}

BestResponse best_response(const CorrelationMatrix& t, const std::array<PlaneObservable, 2>& a, double alpha) {
  require_alpha(alpha);
  const Eigen::Matrix2d m = mat(t);
  const Eigen::Vector2d a1 = vec(a[0].direction()), a2 = vec(a[1].direction());
  const Eigen::Vector2d plus = m.transpose() * (alpha * a1 + a2);
  const Eigen::Vector2d minus = m.transpose() * (alpha * a1 - a2);
  BestResponse r;
  r.observables = {observable_along(plus[0], plus[1]), observable_along(minus[0], minus[1])};
  r.value = plus.norm() + minus.norm();
  return r;
}

MinimizeResult maximize_alpha_chsh(const CorrelationMatrix& t, double alpha, const MinimizeOptions& options) {
  require_alpha(alpha);
  Objective f = [&](std::span<const double> p) {
    return -alpha_chsh_value(t, {PlaneObservable{p[0]}, PlaneObservable{p[1]}},
                             {PlaneObservable{p[2]}, PlaneObservable{p[3]}}, alpha);
  };
  const std::array<double, 4> lo{0, 0, 0, 0};
  const std::array<double, 4> hi{2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi};
  MinimizeResult r = multistart_minimize(f, lo, hi, options);
  r.value = -r.value;
  return r;
}

double Theorem4Report::worst_slack() const noexcept {
  return std::min({sum_form_slack, pair_form_slack[0], pair_form_slack[1]});
}

Theorem4Report check_theorem4(const RealPureState& state, double alpha, const MinimizeOptions& options) {
  require_alpha(alpha);
  if (state.qubits() != 3) throw StructuralError("three-party relations need a three-qubit state");
  const CorrelationMatrix tab = correlation_matrix(state, 0, 1);
  const CorrelationMatrix tac = correlation_matrix(state, 0, 2);
  const Eigen::Matrix2d mac = mat(tac);
  const double a2 = alpha * alpha;
  const std::array<double, 2> lo{0, 0};
  const std::array<double, 2> hi{2 * kPi, 2 * kPi};

  Theorem4Report report;
  report.alpha = alpha;
  report.converged = true;

  Objective sum_form = [&](std::span<const double> p) {
    std::array<PlaneObservable, 2> a{PlaneObservable{p[0]}, PlaneObservable{p[1]}};
    double b = best_response(tab, a, alpha).value;
    double c = best_response(tac, a, alpha).value;
    double hi2 = std::max(b * b, c * c), lo2 = std::min(b * b, c * c);
    return -(a2 * hi2 + lo2);
  };
  MinimizeResult r = multistart_minimize(sum_form, lo, hi, options);
  report.sum_form_slack = 4 * a2 * (1 + a2) + r.value;
  report.converged = report.converged && r.converged;

  for (std::size_t i = 0; i < 2; ++i) {
    Objective pair_form = [&](std::span<const double> p) {
      std::array<PlaneObservable, 2> a{PlaneObservable{p[0]}, PlaneObservable{p[1]}};
      double b = best_response(tab, a, alpha).value;
      double c = (mac.transpose() * vec(a[i].direction())).norm();
      return -(b * b + 4 * c * c);
    };
    MinimizeResult q = multistart_minimize(pair_form, lo, hi, options);
    report.pair_form_slack[i] = 4 * (1 + a2) + q.value;
    report.converged = report.converged && q.converged;
  }
  return report;
}

RealPureState saturating_family(double theta) {
  if (!(theta >= 0.0 && theta <= kPi / 4)) throw StructuralError("theta must lie in [0, pi/4]");
  const double s = std::sqrt(2.0) * std::sin(theta);
  const double plus = std::sqrt(std::max(0.0, (1 + s) / 2));
  const double minus = std::sqrt(std::max(0.0, (1 - s) / 2));
  // |01>|0> is index 0b010, |10>|0> is index 0b100.
  std::vector<double> amps(8, 0.0);
  amps[2] = plus;
  amps[4] = minus;
  return RealPureState::normalized(3, std::move(amps));
}

SaturationPoint saturation_point(double theta, double alpha) {
  require_alpha(alpha);
  const RealPureState state = saturating_family(theta);
  const std::array<PlaneObservable, 2> a{PlaneObservable{0.0}, PlaneObservable{kPi / 2}};
  const BestResponse b = best_response(correlation_matrix(state, 0, 1), a, alpha);
  SaturationPoint p;
  p.theta = theta;
  p.bell_value = alpha_chsh_value(state, a, b.observables, alpha, {0, 1});
  p.correlation = expectation(state, 0, a[0], 2, PlaneObservable{0.0});
  p.residual = p.bell_value * p.bell_value + 4 * p.correlation * p.correlation - 4 * (1 + alpha * alpha);
  return p;
}

double quantum_guessing_bound(double bell_value, double alpha) {
  require_alpha(alpha);
  const double limit = 2 * std::sqrt(1 + alpha * alpha);
  if (std::abs(bell_value) > limit * (1 + 1e-12)) throw StructuralError("Bell value outside the quantum range");
  const double inner = std::max(0.0, 1 + alpha * alpha - bell_value * bell_value / 4);
  return std::min(1.0, 0.5 * (1 + std::sqrt(inner)));
}

double chained_value_from_phases(int settings, int outcomes, const std::vector<PhaseVector>& alice,
                                 const std::vector<PhaseVector>& bob) {
  check_phases(settings, outcomes, alice, bob);
  // Same term list as chained_bkp: <[A_a - B_a]>, <[B_a - A_{a+1}]>, and the
  // wrapped <[B_M - A_1 - 1]>.
  std::vector<double> dist;
  double total = 0;
  auto add = [&](int x, int y, int sign, int shift) {
    difference_distribution(outcomes, alice[static_cast<std::size_t>(x)], bob[static_cast<std::size_t>(y)], dist);
    for (int k = 1; k < outcomes; ++k) total += mod(sign * k + shift, outcomes) * dist[static_cast<std::size_t>(k)];
    if (shift != 0) total += shift * dist[0];
  };
  for (int alpha = 0; alpha < settings; ++alpha) {
    add(alpha, alpha, 1, 0);
    if (alpha + 1 < settings) {
      add(alpha + 1, alpha, -1, 0);
    } else {
      add(0, alpha, -1, outcomes - 1);
    }
  }
  return total;
}

FloatBehavior chained_quantum_behavior(int settings, int outcomes, const std::vector<PhaseVector>& alice,
                                       const std::vector<PhaseVector>& bob) {
  check_phases(settings, outcomes, alice, bob);
  Scenario s(2, settings, outcomes);
  std::vector<double> probs(s.size());
  std::vector<double> dist;
  for (int x = 0; x < settings; ++x) {
    for (int y = 0; y < settings; ++y) {
      difference_distribution(outcomes, alice[static_cast<std::size_t>(x)], bob[static_cast<std::size_t>(y)], dist);
      const int xs[] = {x, y};
      for (int a = 0; a < outcomes; ++a) {
        for (int b = 0; b < outcomes; ++b) {
          const int as[] = {a, b};
          probs[s.index(as, xs)] = dist[static_cast<std::size_t>(mod(a - b, outcomes))] / outcomes;
        }
      }
    }
  }
  return FloatBehavior(s, std::move(probs));
}

ChainedViolation chained_quantum_violation(int settings, int outcomes, const ViolationOptions& options) {
  if (settings < 2 || outcomes < 2) throw StructuralError("chained functional needs M >= 2 and d >= 2");
  std::vector<PhaseVector> alice, bob;

  Objective chain = [&](std::span<const double> p) {
    chain_phases(settings, outcomes, p[0], alice, bob);
    return chained_value_from_phases(settings, outcomes, alice, bob);
  };
  const double half_width = kPi / outcomes;
  const std::array<double, 1> lo{-half_width}, hi{half_width};
  MinimizeOptions line = options.minimize;
  line.initial_step = std::min(line.initial_step, half_width / 4);
  MinimizeResult best = multistart_minimize(chain, lo, hi, line);

  ChainedViolation result;
  chain_phases(settings, outcomes, best.point[0], result.alice, result.bob);
  result.value = best.value;
  result.converged = best.converged;

  const std::size_t free = 2 * static_cast<std::size_t>(settings) * static_cast<std::size_t>(outcomes - 1);
  if (free > options.refine_max_parameters) return result;

  // Free phases j = 1..d-1 for every setting of both parties; phase 0 is a
  // global phase of each basis and stays fixed.
  auto unpack = [&](std::span<const double> p) {
    alice.assign(static_cast<std::size_t>(settings), PhaseVector(static_cast<std::size_t>(outcomes), 0.0));
    bob = alice;
    std::size_t i = 0;
    for (auto* side : {&alice, &bob}) {
      for (PhaseVector& v : *side) {
        for (std::size_t j = 1; j < v.size(); ++j) v[j] = p[i++];
      }
    }
  };
  std::vector<double> seed;
  for (const auto* side : {&result.alice, &result.bob}) {
    for (const PhaseVector& v : *side) seed.insert(seed.end(), v.begin() + 1, v.end());
  }
  Objective full = [&](std::span<const double> p) {
    unpack(p);
    return chained_value_from_phases(settings, outcomes, alice, bob);
  };
  std::vector<double> flo(free, -kPi), fhi(free, kPi);
  MinimizeResult refined = multistart_minimize(full, flo, fhi, options.minimize, {seed});
  if (refined.value < result.value) {
    unpack(refined.point);
    result.alice = alice;
    result.bob = bob;
    result.value = refined.value;
  }
  result.refined = true;
  result.converged = result.converged || refined.converged;
  return result;
}

double key_rate(double bell_value, int outcomes, GuessingBoundKind kind) {
  const double bound = kind == GuessingBoundKind::kMonogamy ? guessing_bound(bell_value, outcomes)
                                                            : guessing_bound_prior(bell_value, 2, outcomes);
  return -std::log2(bound);
}

double key_rate(int settings, int outcomes, GuessingBoundKind kind, const ViolationOptions& options) {
  return key_rate(chained_quantum_violation(settings, outcomes, options).value, outcomes, kind);
}

std::optional<int> min_settings(std::span<const double> violations, int outcomes, double target,
                                GuessingBoundKind kind) {
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (key_rate(violations[i], outcomes, kind) >= target) return static_cast<int>(i) + 2;
  }
  return std::nullopt;
}

std::optional<int> min_settings(int outcomes, double target, GuessingBoundKind kind, int max_settings,
                                const ViolationOptions& options) {
  if (outcomes < 2) throw StructuralError("need d >= 2");
  if (target >= std::log2(static_cast<double>(outcomes))) return std::nullopt;
  for (int m = 2; m <= max_settings; ++m) {
    double v = chained_quantum_violation(m, outcomes, options).value;
    if (key_rate(v, outcomes, kind) >= target) return m;
  }
  return std::nullopt;
}

}  // namespace monolab
