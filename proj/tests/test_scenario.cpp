#include <doctest.h>

#include <cstdlib>
#include <random>

#include "monolab/errors.hpp"
#include "monolab/rational.hpp"
#include "monolab/scenario.hpp"

using namespace monolab;

namespace {

Behavior random_product_behavior(const Scenario& sc, std::mt19937_64& rng) {
  // Product of independent local response tables is always no-signalling.
  std::vector<std::vector<std::vector<Rational>>> local(static_cast<std::size_t>(sc.parties()));
  for (auto& party : local) {
    party.resize(static_cast<std::size_t>(sc.settings()));
    for (auto& dist : party) {
      Rational total = 0;
      for (int a = 0; a < sc.outcomes(); ++a) {
        dist.push_back(Rational(std::uniform_int_distribution<int>(0, 5)(rng)));
        total += dist.back();
      }
      if (total == 0) {
        dist[0] = 1;
        total = 1;
      }
      for (auto& p : dist) p /= total;
    }
  }
  std::vector<Rational> probs(sc.size());
  for (std::size_t x = 0; x < sc.setting_tuples(); ++x) {
    auto xs = sc.setting_tuple(x);
    for (std::size_t a = 0; a < sc.outcome_tuples(); ++a) {
      auto as = sc.outcome_tuple(a);
      Rational p = 1;
      for (int k = 0; k < sc.parties(); ++k) p *= local[k][xs[k]][as[k]];
      probs[x * sc.outcome_tuples() + a] = p;
    }
  }
  return Behavior(sc, probs);
}

}  // namespace

TEST_CASE("rational parsing is exact and decimal") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-1/3") == make_rational(-1, 3));
  CHECK(parse_rational("0.25") == make_rational(1, 4));
  CHECK(parse_rational("0.12") == make_rational(3, 25));
  CHECK(parse_rational("012/3") == 4);
  CHECK(parse_rational("1e-3") == make_rational(1, 1000));
  CHECK(parse_rational("2.5E+2") == 250);
  CHECK(parse_rational("+6/4") == make_rational(3, 2));
  for (const char* bad : {"", "abc", "1/0", "1/-2", "0x10", "1.2.3", "--1", "1e"}) {
    CHECK_THROWS_AS(parse_rational(bad), StructuralError);
  }
  CHECK(to_string(make_rational(6, 4)) == "3/2");
  CHECK(to_string(Rational(-2)) == "-2");
}

TEST_CASE("scenario indexing round-trips") {
  for (auto [n, m, d] : std::vector<std::tuple<int, int, int>>{{1, 3, 2}, {2, 2, 3}, {3, 3, 2}, {4, 2, 2}}) {
    Scenario sc(n, m, d);
    CHECK(sc.size() == sc.setting_tuples() * sc.outcome_tuples());
    for (std::size_t x = 0; x < sc.setting_tuples(); ++x) CHECK(sc.setting_index(sc.setting_tuple(x)) == x);
    for (std::size_t a = 0; a < sc.outcome_tuples(); ++a) CHECK(sc.outcome_index(sc.outcome_tuple(a)) == a);
  }
  Scenario sc(2, 3, 2);
  // party 0 is the most significant digit, settings outermost
  CHECK(sc.index(std::vector<int>{1, 0}, std::vector<int>{2, 1}) == (2 * 3 + 1) * 4 + 2);
  CHECK(sc.setting_tuple(5) == std::vector<int>{1, 2});
}

TEST_CASE("scenario rejects bad parameters and respects the size cap") {
  CHECK_THROWS_AS(Scenario(0, 2, 2), StructuralError);
  CHECK_THROWS_AS(Scenario(2, 0, 2), StructuralError);
  CHECK_THROWS_AS(Scenario(2, 2, 1), StructuralError);
  CHECK_THROWS_AS(Scenario(2, 2, 2, 15), CapacityError);
  CHECK_NOTHROW(Scenario(2, 2, 2, 16));
  CHECK_THROWS_AS(Scenario(2, 2, 2).setting_index(std::vector<int>{0, 2}), StructuralError);

  ::setenv("MONOGAMY_LAB_CAP", "50", 1);
  CHECK(size_cap() == 50);
  CHECK_THROWS_AS(Scenario(3, 2, 2), CapacityError);
  ::setenv("MONOGAMY_LAB_CAP", "garbage", 1);
  CHECK(size_cap() == kDefaultSizeCap);
  ::unsetenv("MONOGAMY_LAB_CAP");
  CHECK(size_cap() == kDefaultSizeCap);
}

TEST_CASE("validation separates negativity and normalization") {
  Scenario sc(2, 2, 2);
  auto u = Behavior::uniform(sc);
  CHECK(validate(u).ok());
  CHECK(check_nonsignalling(u).nonsignalling);

  std::vector<Rational> probs(u.values().begin(), u.values().end());
  probs[0] = make_rational(1, 2);
  probs[1] = 0;
  CHECK(validate(Behavior(sc, probs)).ok());
  probs[1] = make_rational(-1, 4);
  probs[2] = make_rational(1, 2);
  auto report = validate(Behavior(sc, probs));
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::kNegative);
  probs[1] = make_rational(1, 4);
  auto unnormalized = validate(Behavior(sc, probs));
  REQUIRE(unnormalized.violations.size() == 1);
  CHECK(unnormalized.violations[0].kind == ViolationKind::kNormalization);
  CHECK(unnormalized.violations[0].amount == make_rational(1, 2));

  CHECK_THROWS_AS(Behavior(sc, std::vector<Rational>(3)), StructuralError);
}

TEST_CASE("signalling is detected exactly and within tolerance") {
  Scenario sc(2, 2, 2);
  // Bob's outcome copies Alice's setting: signals from A to B.
  std::vector<Rational> probs(sc.size(), Rational(0));
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) probs[sc.index(std::vector<int>{0, x}, std::vector<int>{x, y})] = 1;
  }
  Behavior b(sc, probs);
  CHECK(validate(b).ok());
  auto ns = check_nonsignalling(b);
  CHECK_FALSE(ns.nonsignalling);
  CHECK(ns.worst_violation == 1);

  auto fb = to_float(Behavior::uniform(sc));
  std::vector<double> nudged(fb.values().begin(), fb.values().end());
  nudged[0] += 1e-12;
  nudged[1] -= 1e-12;
  CHECK(check_nonsignalling(FloatBehavior(sc, nudged), 1e-9).nonsignalling);
  CHECK_FALSE(check_nonsignalling(FloatBehavior(sc, nudged), 0.0).nonsignalling);
}

TEST_CASE("deterministic vertices, mixtures and products are no-signalling") {
  std::mt19937_64 rng(11);
  Scenario sc(3, 2, 2);
  std::size_t visited = 0;
  for_each_deterministic_assignment(sc, [&](const DeterministicAssignment& a) {
    if (visited++ % 7 != 0) return;
    auto v = deterministic_vertex(sc, a);
    CHECK(validate(v).ok());
    CHECK(check_nonsignalling(v).nonsignalling);
  });
  CHECK(visited == 64);

  for (int trial = 0; trial < 20; ++trial) {
    auto b1 = random_product_behavior(sc, rng);
    auto b2 = random_product_behavior(sc, rng);
    std::vector<Behavior> parts{b1, b2};
    std::vector<Rational> w{make_rational(1, 3), make_rational(2, 3)};
    auto m = mix<Rational>(parts, w);
    CHECK(validate(m).ok());
    CHECK(check_nonsignalling(m).nonsignalling);
  }

  Scenario one(1, 2, 3);
  Scenario two(2, 2, 3);
  auto p = product(random_product_behavior(one, rng), random_product_behavior(two, rng));
  CHECK(p.scenario() == Scenario(3, 2, 3));
  CHECK(validate(p).ok());
  CHECK(check_nonsignalling(p).nonsignalling);
}

TEST_CASE("marginals of a product recover the factors") {
  std::mt19937_64 rng(5);
  Scenario one(1, 3, 2);
  auto first = random_product_behavior(one, rng);
  auto second = random_product_behavior(one, rng);
  auto joint = product(first, second);
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      auto mar = marginal(joint, std::vector<int>{0}, std::vector<int>{x});
      CHECK_FALSE(mar.complement_dependent);
      CHECK(mar.probs[0] == first.column(static_cast<std::size_t>(x))[0]);
      auto mb = marginal(joint, std::vector<int>{1}, std::vector<int>{y});
      CHECK(mb.probs[1] == second.column(static_cast<std::size_t>(y))[1]);
    }
  }
}
