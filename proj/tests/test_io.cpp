#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "monolab/io.hpp"

using namespace monolab;

TEST_CASE("behavior documents round-trip") {
  std::mt19937_64 rng(1);
  auto b = random_ns_behavior(Scenario(2, 2, 3), rng);
  auto doc = behavior_to_json(b);
  CHECK(doc["encoding"] == "x-outer-a-inner");
  CHECK(doc["scenario"]["d"] == 3);
  CHECK(behavior_from_json(doc) == b);
  CHECK(parse_behavior(doc.dump()) == b);

  auto fdoc = behavior_to_json(to_float(b));
  CHECK(fdoc["values"][0].is_number());
}

TEST_CASE("numeric values are read from their decimal text") {
  auto b = parse_behavior(R"({"scenario": {"N": 1, "M": 1, "d": 2}, "values": [0.1, "9/10"]})");
  CHECK(b.values()[0] == make_rational(1, 10));
  CHECK(b.values()[1] == make_rational(9, 10));
}

TEST_CASE("parse diagnostics name the location") {
  try {
    parse_behavior("{\n  \"scenario\": {\"N\": 1,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where().rfind("line 3", 0) == 0);
  }
  auto where = [](const char* text) {
    try {
      parse_behavior(text);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("none");
  };
  CHECK(where(R"({"values": []})") == "");
  CHECK(where(R"({"scenario": {"N": 1, "M": 1}, "values": []})") == "/scenario");
  CHECK(where(R"({"scenario": {"N": 1, "M": 1, "d": 2}, "values": ["1", "x"]})") == "/values/1");
  CHECK(where(R"({"scenario": {"N": 1, "M": 1, "d": 2}, "values": ["1"]})") == "/values");
  CHECK(where(R"({"scenario": {"N": 1, "M": 1, "d": 2}, "encoding": "a-outer", "values": ["1", "0"]})") ==
        "/encoding");
  CHECK(where(R"({"scenario": {"N": 0, "M": 1, "d": 2}, "values": []})") == "/scenario");
  CHECK(where(R"({"scenario": {"N": 1, "M": 1, "d": 2}, "values": ["1", "0"]})") == "none");
}

TEST_CASE("functional documents round-trip") {
  auto f = recursive_bkp(3, 2, 3);
  auto doc = functional_to_json(f);
  CHECK(doc["classical_bound"] == "2");
  auto g = functional_from_json(doc);
  CHECK(g.terms() == f.terms());
  CHECK(g.scenario() == f.scenario());
  CHECK(g.name() == f.name());
  CHECK(g.classical_bound == f.classical_bound);
  CHECK(g.ns_minimum == f.ns_minimum);

  std::ostringstream csv;
  write_functional_csv(csv, chained_bkp(2, 2));
  const std::string text = csv.str();
  CHECK(text.rfind("setting_index,outcome_index,settings,outcomes,coefficient\n", 0) == 0);
  // each of the four terms has two outcome pairs with [.] = 1
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 8);
}

TEST_CASE("adversary models round-trip") {
  Scenario sc(2, 2, 2);
  std::mt19937_64 rng(6);
  std::vector<Behavior> pool{Behavior::uniform(sc)};
  auto model = random_adversary_model(sc, pool, rng);
  auto doc = adversary_model_to_json(model);
  auto back = adversary_model_from_json(doc);
  CHECK(back.prior() == model.prior());
  REQUIRE(back.strategies().size() == model.strategies().size());
  for (std::size_t w = 0; w < back.strategies().size(); ++w) {
    CHECK(back.strategies()[w].behavior == model.strategies()[w].behavior);
    CHECK(back.strategies()[w].inputs == model.strategies()[w].inputs);
  }
}

TEST_CASE("linear program dumps") {
  LinearProgram lp(2);
  lp.set_objective({1, 1}, Sense::kMaximize);
  lp.add_constraint({{{0, 1}, {1, 1}}, Relation::kLessEqual, 3, "cap"});
  lp.set_bounds(1, std::nullopt, Rational(2));
  auto doc = lp_to_json(lp);
  CHECK(doc["sense"] == "max");
  CHECK(doc["constraints"][0]["label"] == "cap");
  CHECK(doc["constraints"][0]["relation"] == "<=");
  CHECK(doc["bounds"][1]["lower"].is_null());
  CHECK(doc["bounds"][1]["upper"] == "2");
  auto sol = solution_to_json(solve(lp));
  CHECK(sol["status"] == "optimal");
  CHECK(sol["value"] == "3");
}

TEST_CASE("tables") {
  Table t{{"a", "b"}, {}};
  t.add_row({"1", "x,y"});
  t.add_row({"say \"hi\"", ""});
  CHECK_THROWS_AS(t.add_row({"only one"}), StructuralError);
  std::ostringstream out;
  write_csv(out, t);
  CHECK(out.str() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
  auto doc = table_to_json(t);
  CHECK(doc[0]["b"] == "x,y");

  FeasibilityCurve curve;
  curve.rows.push_back({2, 2, 0.05, 4, 2, 4, 0.25, 0.5, SourceVariant::kCommon});
  auto ft = feasibility_table(curve);
  CHECK(ft.columns == std::vector<std::string>{"N", "d", "epsilon", "M", "r", "exponent", "I_Q", "rhs_bound", "variant"});
  CHECK(ft.rows[0][8] == "common");
  CHECK(format_double(0.1) == "0.1");
}
