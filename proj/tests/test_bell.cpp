#include <doctest.h>

#include <random>

#include "monolab/bell.hpp"
#include "monolab/errors.hpp"
#include "monolab/polylp.hpp"

using namespace monolab;

namespace {

int mod(int v, int d) { return ((v % d) + d) % d; }

// Outcome of a party at a relabeled setting j that may run past M:
// X_{iM + g} = [X_g + i].
int virtual_outcome(const std::vector<int>& table, int j, int d) {
  const int m = static_cast<int>(table.size());
  return mod(table[static_cast<std::size_t>(j % m)] + j / m, d);
}

// Chained functional written directly from its two-party definition.
Rational chained_oracle(const std::vector<int>& a, const std::vector<int>& b, int d) {
  const int m = static_cast<int>(a.size());
  int total = 0;
  for (int i = 0; i < m; ++i) {
    total += mod(a[i] - b[i], d);
    total += mod(b[i] - virtual_outcome(a, i + 1, d), d);
  }
  return total;
}

// Three-party functional: second party relabeled by the third party's
// setting, third party inserted with the sign opposite to the second one.
Rational three_party_oracle(const std::vector<int>& a1, const std::vector<int>& a2, const std::vector<int>& a3,
                            int d) {
  const int m = static_cast<int>(a1.size());
  int total = 0;
  for (int s = 0; s < m; ++s) {
    for (int i = 0; i < m; ++i) {
      const int second = virtual_outcome(a2, i + s, d);
      total += mod(a1[i] - second + a3[s], d);
      total += mod(second - virtual_outcome(a1, i + 1, d) - a3[s], d);
    }
  }
  return make_rational(total, m);
}

// Same chained functional evaluated on probabilities.
Rational chained_oracle(const Behavior& b) {
  const Scenario& sc = b.scenario();
  const int m = sc.settings();
  const int d = sc.outcomes();
  Rational total = 0;
  auto mean = [&](int x, int y, int ca, int cb, int shift) {
    Rational s = 0;
    for (int a = 0; a < d; ++a) {
      for (int bb = 0; bb < d; ++bb) {
        s += mod(ca * a + cb * bb + shift, d) *
             b.at(std::vector<int>{a, bb}, std::vector<int>{x, y});
      }
    }
    return s;
  };
  for (int i = 0; i < m; ++i) {
    total += mean(i, i, 1, -1, 0);
    if (i + 1 < m) {
      total += mean(i + 1, i, -1, 1, 0);
    } else {
      total += mean(0, m - 1, -1, 1, -1);
    }
  }
  return total;
}

std::vector<Rational> random_distribution(std::mt19937_64& rng, int d) {
  std::vector<Rational> p(static_cast<std::size_t>(d));
  Rational total = 0;
  for (auto& v : p) {
    v = std::uniform_int_distribution<int>(0, 30)(rng);
    total += v;
  }
  if (total == 0) {
    p[0] = 1;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("modular mean and its input checks") {
  std::vector<Rational> p{make_rational(1, 2), make_rational(1, 4), make_rational(1, 4)};
  CHECK(modular_mean<Rational>(p) == make_rational(3, 4));
  std::vector<double> q{0.5, 0.5};
  CHECK(modular_mean<double>(q) == doctest::Approx(0.5));
  std::vector<Rational> bad{make_rational(1, 2), make_rational(1, 4)};
  CHECK_THROWS_AS(modular_mean<Rational>(bad), StructuralError);
}

TEST_CASE("both modular-mean identities hold with zero residual") {
  std::mt19937_64 rng(99);
  for (int d = 2; d <= 6; ++d) {
    for (int trial = 0; trial < 60; ++trial) {
      auto p = random_distribution(rng, d);
      auto r = fact1_check(p);
      CHECK(r.first == 0);
      CHECK(r.second == 0);
      // independent evaluation of <[Omega]> + <[-Omega-1]>
      Rational direct = 0;
      for (int i = 0; i < d; ++i) direct += (i + mod(-i - 1, d)) * p[static_cast<std::size_t>(i)];
      CHECK(direct == d - 1);
    }
  }
}

TEST_CASE("chained functional layout") {
  auto f = chained_bkp(3, 2);
  CHECK(f.terms().size() == 6);
  CHECK(f.classical_bound == Rational(1));
  CHECK(f.ns_minimum == Rational(0));
  const auto& last = f.terms().back();
  CHECK(last.settings == std::vector<int>{0, 2});
  CHECK(last.coeffs == std::vector<int>{-1, 1});
  CHECK(last.shift == 1);
  CHECK(bell_setting_indices(f).size() == 6);
  CHECK(bell_setting_indices(chained_bkp(2, 3)).size() == 4);
  CHECK_THROWS_AS(chained_bkp(1, 2), StructuralError);
  CHECK_THROWS_AS(recursive_bkp(1, 2, 2), StructuralError);
}

TEST_CASE("malformed terms are rejected") {
  Scenario sc(2, 2, 2);
  CHECK_THROWS_AS(BellFunctional(sc, {ModularTerm{{1}, {0}, 0, 1}}), StructuralError);
  CHECK_THROWS_AS(BellFunctional(sc, {ModularTerm{{2, 0}, {0, 0}, 0, 1}}), StructuralError);
  CHECK_THROWS_AS(BellFunctional(sc, {ModularTerm{{1, 0}, {2, 0}, 0, 1}}), StructuralError);
  CHECK_THROWS_AS(BellFunctional(sc, {ModularTerm{{0, 0}, {0, 0}, 0, 1}}), StructuralError);
  CHECK_THROWS_AS(BellFunctional(sc, {ModularTerm{{1, -1}, {0, 0}, 2, 1}}), StructuralError);
}

TEST_CASE("vertex values match the direct two-party definition") {
  for (auto [m, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 2}}) {
    auto f = chained_bkp(m, d);
    Rational best = -1;
    for_each_deterministic_assignment(f.scenario(), [&](const DeterministicAssignment& a) {
      const Rational expected = chained_oracle(a.outcome[0], a.outcome[1], d);
      CHECK(evaluate_vertex(f, a) == expected);
      if (best < 0 || expected < best) best = expected;
    });
    CHECK(classical_minimum(f).value == best);
    CHECK(best == d - 1);
  }
}

TEST_CASE("three-party vertex values match the relabeling rule") {
  for (auto [m, d] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
    auto f = recursive_bkp(3, m, d);
    for_each_deterministic_assignment(f.scenario(), [&](const DeterministicAssignment& a) {
      CHECK(evaluate_vertex(f, a) == three_party_oracle(a.outcome[0], a.outcome[1], a.outcome[2], d));
    });
  }
}

TEST_CASE("term, dense and vertex evaluation agree") {
  std::mt19937_64 rng(17);
  for (auto [n, m, d] : std::vector<std::tuple<int, int, int>>{{2, 2, 2}, {2, 3, 2}, {2, 2, 3}, {3, 2, 2}}) {
    auto f = recursive_bkp(n, m, d);
    for (int trial = 0; trial < 4; ++trial) {
      auto b = random_ns_behavior(f.scenario(), rng);
      const Rational value = evaluate(f, b);
      CHECK(value == evaluate_dense(f, b));
      CHECK(evaluate(f, to_float(b)) == doctest::Approx(value.get_d()).epsilon(1e-12));
      CHECK(value >= 0);
      if (n == 2) CHECK(value == chained_oracle(b));
    }
    std::size_t seen = 0;
    for_each_deterministic_assignment(f.scenario(), [&](const DeterministicAssignment& a) {
      if (seen++ % 5 == 0) CHECK(evaluate_vertex(f, a) == evaluate(f, deterministic_vertex(f.scenario(), a)));
    });
  }
}

TEST_CASE("no-signalling minimum is zero") {
  for (auto [n, m, d] : std::vector<std::tuple<int, int, int>>{{2, 2, 2}, {2, 3, 2}, {2, 2, 3}, {3, 2, 2}}) {
    auto f = recursive_bkp(n, m, d);
    auto opt = optimize_over_ns(f.scenario(), f.dense(), Sense::kMinimize);
    REQUIRE(opt.solution.status == LPStatus::kOptimal);
    CHECK(opt.solution.value == 0);
    CHECK(evaluate(f, *opt.behavior) == 0);
  }
}

TEST_CASE("recursive functional is symmetric under the stated party exchange") {
  CHECK(symmetry_check(3, 2, 2));
  CHECK(symmetry_check(3, 2, 3));
  CHECK(symmetry_check(4, 2, 2));
  CHECK_THROWS_AS(symmetry_check(2, 2, 2), StructuralError);
}

TEST_CASE("idle parties do not change the value") {
  std::mt19937_64 rng(8);
  auto f = chained_bkp(2, 2);
  auto g = append_idle_parties(f, 1);
  CHECK(g.scenario() == Scenario(3, 2, 2));
  CHECK(g.classical_bound == f.classical_bound);
  auto b = random_ns_behavior(f.scenario(), rng);
  auto extra = random_ns_behavior(Scenario(1, 2, 2), rng);
  CHECK(evaluate(g, product(b, extra)) == evaluate(f, b));
  CHECK(classical_minimum(g).value == classical_minimum(f).value);
}
