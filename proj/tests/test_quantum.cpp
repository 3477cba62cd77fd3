#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "monolab/bell.hpp"
#include "monolab/errors.hpp"
#include "monolab/quantum.hpp"

using namespace monolab;
using std::numbers::pi;

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

Eigen::MatrixXd plane_matrix(double angle) {
  Eigen::MatrixXd m(2, 2);
  m << std::cos(angle), std::sin(angle), std::sin(angle), -std::cos(angle);
  return m;
}

// <psi| O_0 (x) O_1 (x) O_2 |psi> with identity on unlisted qubits.
double three_qubit_expectation(const RealPureState& state, const std::array<std::optional<double>, 3>& angles) {
  Eigen::MatrixXd op = Eigen::MatrixXd::Identity(1, 1);
  for (const auto& a : angles) op = kron(op, a ? plane_matrix(*a) : Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd psi(8);
  for (int i = 0; i < 8; ++i) psi(i) = state.amplitudes()[static_cast<std::size_t>(i)];
  return psi.dot(op * psi);
}

// Probabilities of the chained scenario computed from the maximally entangled
// state vector. Alice's outcome a of setting x is the vector
// exp(i(2 pi j a / d + phi_x[j])) / sqrt d; Bob measures in the conjugate
// basis exp(i(psi_y[j] - 2 pi j b / d)) / sqrt d.
FloatBehavior state_vector_behavior(int m, int d, const std::vector<PhaseVector>& alice,
                                    const std::vector<PhaseVector>& bob) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
  for (int j = 0; j < d; ++j) psi(j * d + j) = 1.0 / std::sqrt(static_cast<double>(d));
  Scenario sc(2, m, d);
  std::vector<double> probs(sc.size());
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      Eigen::MatrixXcd ua(d, d);
      Eigen::MatrixXcd vb(d, d);
      for (int o = 0; o < d; ++o) {
        for (int j = 0; j < d; ++j) {
          ua(j, o) = std::polar(1.0 / std::sqrt(d), 2 * pi * j * o / d + alice[x][j]);
          vb(j, o) = std::polar(1.0 / std::sqrt(d), bob[y][j] - 2 * pi * j * o / d);
        }
      }
      REQUIRE((ua.adjoint() * ua - Eigen::MatrixXcd::Identity(d, d)).norm() < 1e-12);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          Complex amp = 0;
          for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) amp += std::conj(ua(j, a)) * std::conj(vb(k, b)) * psi(j * d + k);
          }
          probs[sc.index(std::vector<int>{a, b}, std::vector<int>{x, y})] = std::norm(amp);
        }
      }
    }
  }
  return FloatBehavior(sc, probs);
}

}  // namespace

TEST_CASE("plane observables") {
  for (double angle : {0.0, 0.3, pi / 2, 2.0}) {
    PlaneObservable o{angle};
    auto m = o.matrix();
    // squares to the identity
    CHECK(m[0] * m[0] + m[1] * m[2] == doctest::Approx(1.0));
    CHECK(m[0] * m[1] + m[1] * m[3] == doctest::Approx(0.0));
    auto dir = o.direction();
    CHECK(dir[0] == doctest::Approx(std::sin(angle)));
    CHECK(dir[1] == doctest::Approx(std::cos(angle)));
    auto back = observable_along(3 * dir[0], 3 * dir[1]);
    CHECK(std::cos(back.angle - angle) == doctest::Approx(1.0));
  }
}

TEST_CASE("state construction checks") {
  CHECK_THROWS_AS(RealPureState(2, {1, 0, 0}), StructuralError);
  CHECK_THROWS_AS(RealPureState(1, {1, 1}), StructuralError);
  CHECK_THROWS_AS(RealPureState::normalized(1, {0, 0}), StructuralError);
  auto s = RealPureState::normalized(1, {3, 4});
  CHECK(s.amplitudes()[0] == doctest::Approx(0.6));
}

TEST_CASE("correlation matrices of Bell states") {
  const double r = 1 / std::sqrt(2.0);
  RealPureState phi_plus(2, {r, 0, 0, r});
  auto t = correlation_matrix(phi_plus, 0, 1);
  CHECK(t.entries[0][0] == doctest::Approx(1.0));
  CHECK(t.entries[1][1] == doctest::Approx(1.0));
  CHECK(t.entries[0][1] == doctest::Approx(0.0));
  RealPureState singlet(2, {0, r, -r, 0});
  auto s = correlation_matrix(singlet, 0, 1);
  CHECK(s.entries[0][0] == doctest::Approx(-1.0));
  CHECK(s.entries[1][1] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues()[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(correlation_matrix(singlet, 0, 0), StructuralError);
  CHECK_THROWS_AS(correlation_matrix(singlet, 0, 2), StructuralError);
}

TEST_CASE("expectations agree with explicit operators") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(0, 2 * pi);
  for (int trial = 0; trial < 25; ++trial) {
    auto state = random_real_state(3, rng);
    const double a = angle(rng);
    const double c = angle(rng);
    CHECK(expectation(state, 0, PlaneObservable{a}, 2, PlaneObservable{c}) ==
          doctest::Approx(three_qubit_expectation(state, {a, std::nullopt, c})).epsilon(1e-12));
    CHECK(expectation(state, 1, PlaneObservable{a}) ==
          doctest::Approx(three_qubit_expectation(state, {std::nullopt, a, std::nullopt})).epsilon(1e-12));
    auto t = correlation_matrix(state, 1, 2);
    CHECK(t.correlation(PlaneObservable{a}, PlaneObservable{c}) ==
          doctest::Approx(three_qubit_expectation(state, {std::nullopt, a, c})).epsilon(1e-12));
  }
}

TEST_CASE("alpha-CHSH maximum agrees with direct maximization") {
  std::mt19937_64 rng(5);
  MinimizeOptions opts;
  opts.starts = 8;
  for (int trial = 0; trial < 10; ++trial) {
    auto state = random_real_state(2, rng);
    auto t = correlation_matrix(state, 0, 1);
    for (double alpha : {1.0, 2.5}) {
      auto numeric = maximize_alpha_chsh(t, alpha, opts);
      CHECK(numeric.value == doctest::Approx(alpha_chsh_max(t, alpha)).epsilon(1e-7));
      std::array<PlaneObservable, 2> a{PlaneObservable{0.4}, PlaneObservable{1.9}};
      auto best = best_response(t, a, alpha);
      CHECK(alpha_chsh_value(t, a, best.observables, alpha) == doctest::Approx(best.value));
      std::array<PlaneObservable, 2> other{PlaneObservable{0.1}, PlaneObservable{2.2}};
      CHECK(alpha_chsh_value(t, a, other, alpha) <= best.value + 1e-12);
    }
  }
  CorrelationMatrix t;
  CHECK_THROWS_AS(alpha_chsh_max(t, 0.5), HypothesisError);
}

TEST_CASE("maximally entangled state reaches the Tsirelson-type value") {
  const double r = 1 / std::sqrt(2.0);
  RealPureState phi_plus(2, {r, 0, 0, r});
  auto t = correlation_matrix(phi_plus, 0, 1);
  for (double alpha : {1.0, 2.0}) CHECK(alpha_chsh_max(t, alpha) == doctest::Approx(2 * std::sqrt(1 + alpha * alpha)));
}

TEST_CASE("three-qubit relations hold on random states") {
  std::mt19937_64 rng(77);
  MinimizeOptions opts;
  opts.starts = 8;
  for (int trial = 0; trial < 60; ++trial) {
    auto state = random_real_state(3, rng);
    for (double alpha : {1.0, 2.0}) {
      auto report = check_theorem4(state, alpha, opts);
      CHECK(report.converged);
      CHECK(report.satisfied());
    }
  }
}

TEST_CASE("saturating family") {
  for (int i = 0; i <= 10; ++i) {
    const double theta = pi / 4 * i / 10;
    auto state = saturating_family(theta);
    double norm = 0;
    for (double v : state.amplitudes()) norm += v * v;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
    for (double alpha : {1.0, 1.5, 3.0}) {
      auto p = saturation_point(theta, alpha);
      CHECK(std::abs(p.residual) < 1e-9);
      CHECK(p.bell_value * p.bell_value + 4 * p.correlation * p.correlation ==
            doctest::Approx(4 * (1 + alpha * alpha)));
    }
  }
  CHECK_THROWS_AS(saturating_family(-0.1), StructuralError);
  CHECK_THROWS_AS(saturating_family(1.0), StructuralError);
}

TEST_CASE("qubit guessing bound") {
  CHECK(quantum_guessing_bound(2 * std::sqrt(2.0), 1.0) == doctest::Approx(0.5));
  CHECK(quantum_guessing_bound(0.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(quantum_guessing_bound(4.0, 1.0), StructuralError);
}

TEST_CASE("chained probabilities match the state-vector computation") {
  for (auto [m, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 3}, {2, 4}}) {
    std::mt19937_64 rng(static_cast<unsigned>(m * 10 + d));
    std::uniform_real_distribution<double> phase(-pi, pi);
    std::vector<PhaseVector> alice(m, PhaseVector(d));
    std::vector<PhaseVector> bob(m, PhaseVector(d));
    for (auto& v : alice) for (auto& p : v) p = phase(rng);
    for (auto& v : bob) for (auto& p : v) p = phase(rng);
    auto expected = state_vector_behavior(m, d, alice, bob);
    auto got = chained_quantum_behavior(m, d, alice, bob);
    for (std::size_t i = 0; i < got.values().size(); ++i) {
      CHECK(got.values()[i] == doctest::Approx(expected.values()[i]).epsilon(1e-12));
    }
    CHECK(chained_value_from_phases(m, d, alice, bob) ==
          doctest::Approx(evaluate(chained_bkp(m, d), expected)).epsilon(1e-12));
  }
}

TEST_CASE("chained violation for two outcomes follows the closed form") {
  for (int m : {2, 3, 4, 8}) {
    auto v = chained_quantum_violation(m, 2);
    const double s = std::sin(pi / (4 * m));
    CHECK(v.value == doctest::Approx(2 * m * s * s).epsilon(1e-7));
    CHECK(v.converged);
  }
  CHECK(chained_quantum_violation(2, 2).value == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("three-outcome violation") {
  auto v = chained_quantum_violation(2, 3);
  // CGLMP value 4(2 sqrt3 + 3)/9 of the maximally entangled state, in this normalization
  CHECK(v.value == doctest::Approx(4 - 4 * (2 * std::sqrt(3.0) + 3) / 9).epsilon(1e-8));
  auto behavior = state_vector_behavior(2, 3, v.alice, v.bob);
  CHECK(evaluate(chained_bkp(2, 3), behavior) == doctest::Approx(v.value).epsilon(1e-10));
  CHECK(v.value < 2);
}

TEST_CASE("key rates and minimal settings") {
  CHECK(key_rate(0.0, 4, GuessingBoundKind::kMonogamy) == doctest::Approx(2.0));
  CHECK(key_rate(0.0, 4, GuessingBoundKind::kPrior) == doctest::Approx(2.0));
  CHECK(key_rate(1.0, 2, GuessingBoundKind::kMonogamy) == doctest::Approx(0.0));
  std::vector<double> violations{0.9, 0.5, 0.2, 0.05};
  // (1 + I) / 3 <= 2^-1 needs I <= 1/2
  CHECK(min_settings(violations, 3, 1.0, GuessingBoundKind::kMonogamy) == 3);
  // (1/3)(1 + 9 I / 4) <= 1/2 needs I <= 2/9
  CHECK(min_settings(violations, 3, 1.0, GuessingBoundKind::kPrior) == 4);
  CHECK_FALSE(min_settings(violations, 3, 1.55, GuessingBoundKind::kMonogamy));
  CHECK_FALSE(min_settings(2, 1.0, GuessingBoundKind::kMonogamy));
  auto three = min_settings(3, 1.0, GuessingBoundKind::kMonogamy, 64);
  auto three_prior = min_settings(3, 1.0, GuessingBoundKind::kPrior, 64);
  REQUIRE(three);
  REQUIRE(three_prior);
  CHECK(*three <= *three_prior);
}
