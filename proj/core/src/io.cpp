#include "monolab/io.hpp"

#include <charconv>
#include <ostream>

namespace monolab {
namespace {

using nlohmann::json;

const json& require(const json& object, const std::string& key, const std::string& where) {
  if (!object.is_object()) throw ParseError(where, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(where, "missing field \"" + key + "\"");
  return *it;
}

int require_int(const json& object, const std::string& key, const std::string& where) {
  const json& v = require(object, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "/" + key, "expected an integer");
  return v.get<int>();
}

Rational rational_from_json(const json& value, const std::string& where) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number()) return parse_rational(value.dump());
  } catch (const StructuralError& e) {
    throw ParseError(where, e.what());
  }
  throw ParseError(where, "expected a number or a rational string");
}

std::vector<Rational> rationals_from_json(const json& array, const std::string& where) {
  if (!array.is_array()) throw ParseError(where, "expected an array");
  std::vector<Rational> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) out.push_back(rational_from_json(array[i], where + "/" + std::to_string(i)));
  return out;
}

json rationals_to_json(std::span<const Rational> values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

std::vector<int> ints_from_json(const json& array, const std::string& where) {
  if (!array.is_array()) throw ParseError(where, "expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < array.size(); ++i) {
    if (!array[i].is_number_integer()) throw ParseError(where + "/" + std::to_string(i), "expected an integer");
    out.push_back(array[i].get<int>());
  }
  return out;
}

std::string optional_rational(const std::optional<Rational>& value) { return value ? to_string(*value) : ""; }

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::kLessEqual:
      return "<=";
    case Relation::kEqual:
      return "==";
    case Relation::kGreaterEqual:
      return ">=";
  }
  return "?";
}

}  // namespace

json scenario_to_json(const Scenario& scenario) {
  return {{"N", scenario.parties()}, {"M", scenario.settings()}, {"d", scenario.outcomes()}};
}

Scenario scenario_from_json(const json& document, const std::string& where) {
  const int n = require_int(document, "N", where);
  const int m = require_int(document, "M", where);
  const int d = require_int(document, "d", where);
  try {
    return Scenario(n, m, d);
  } catch (const StructuralError& e) {
    throw ParseError(where, e.what());
  }
}

json behavior_to_json(const Behavior& behavior) {
  return {{"scenario", scenario_to_json(behavior.scenario())},
          {"encoding", "x-outer-a-inner"},
          {"values", rationals_to_json(behavior.values())}};
}

json behavior_to_json(const FloatBehavior& behavior) {
  json values = json::array();
  for (double v : behavior.values()) values.push_back(v);
  return {{"scenario", scenario_to_json(behavior.scenario())}, {"encoding", "x-outer-a-inner"}, {"values", values}};
}

Behavior behavior_from_json(const json& document) {
  if (!document.is_object()) throw ParseError("/", "expected an object");
  Scenario scenario = scenario_from_json(require(document, "scenario", ""), "/scenario");
  if (auto it = document.find("encoding"); it != document.end()) {
    if (!it->is_string() || it->get<std::string>() != "x-outer-a-inner") {
      throw ParseError("/encoding", "only \"x-outer-a-inner\" is supported");
    }
  }
  auto values = rationals_from_json(require(document, "values", ""), "/values");
  if (values.size() != scenario.size()) {
    throw ParseError("/values", "expected " + std::to_string(scenario.size()) + " entries, found " +
                                    std::to_string(values.size()));
  }
  return Behavior(std::move(scenario), std::move(values));
}

Behavior parse_behavior(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column), "malformed JSON");
  }
  return behavior_from_json(document);
}

json functional_to_json(const BellFunctional& functional) {
  json terms = json::array();
  for (const auto& t : functional.terms()) {
    terms.push_back({{"coeffs", t.coeffs}, {"settings", t.settings}, {"shift", t.shift}, {"weight", to_string(t.weight)}});
  }
  json out = {{"name", functional.name()}, {"scenario", scenario_to_json(functional.scenario())}, {"terms", terms}};
  out["classical_bound"] = functional.classical_bound ? json(to_string(*functional.classical_bound)) : json(nullptr);
  out["ns_minimum"] = functional.ns_minimum ? json(to_string(*functional.ns_minimum)) : json(nullptr);
  return out;
}

BellFunctional functional_from_json(const json& document) {
  Scenario scenario = scenario_from_json(require(document, "scenario", ""), "/scenario");
  const json& terms = require(document, "terms", "");
  if (!terms.is_array()) throw ParseError("/terms", "expected an array");
  std::vector<ModularTerm> parsed;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string where = "/terms/" + std::to_string(i);
    ModularTerm t;
    t.coeffs = ints_from_json(require(terms[i], "coeffs", where), where + "/coeffs");
    t.settings = ints_from_json(require(terms[i], "settings", where), where + "/settings");
    t.shift = require_int(terms[i], "shift", where);
    t.weight = rational_from_json(require(terms[i], "weight", where), where + "/weight");
    parsed.push_back(std::move(t));
  }
  std::string name;
  if (auto it = document.find("name"); it != document.end() && it->is_string()) name = it->get<std::string>();
  BellFunctional f(std::move(scenario), std::move(parsed), std::move(name));
  for (const char* key : {"classical_bound", "ns_minimum"}) {
    auto it = document.find(key);
    if (it == document.end() || it->is_null()) continue;
    Rational v = rational_from_json(*it, std::string("/") + key);
    (std::string_view(key) == "classical_bound" ? f.classical_bound : f.ns_minimum) = v;
  }
  return f;
}

void write_functional_csv(std::ostream& out, const BellFunctional& functional) {
  const Scenario& sc = functional.scenario();
  const auto dense = functional.dense();
  out << "setting_index,outcome_index,settings,outcomes,coefficient\n";
  for (std::size_t x = 0; x < sc.setting_tuples(); ++x) {
    for (std::size_t a = 0; a < sc.outcome_tuples(); ++a) {
      const Rational& c = dense[x * sc.outcome_tuples() + a];
      if (c == 0) continue;
      std::string xs;
      std::string as;
      for (int v : sc.setting_tuple(x)) xs += std::to_string(v);
      for (int v : sc.outcome_tuple(a)) as += std::to_string(v);
      out << x << ',' << a << ',' << xs << ',' << as << ',' << to_string(c) << '\n';
    }
  }
}

json lp_to_json(const LinearProgram& lp) {
  json constraints = json::array();
  for (const auto& c : lp.constraints()) {
    json terms = json::array();
    for (const auto& t : c.terms) terms.push_back({{"var", t.var}, {"coef", to_string(t.coef)}});
    constraints.push_back(
        {{"label", c.label}, {"terms", terms}, {"relation", relation_name(c.relation)}, {"rhs", to_string(c.rhs)}});
  }
  json bounds = json::array();
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    bounds.push_back({{"lower", lp.lower(j) ? json(to_string(*lp.lower(j))) : json(nullptr)},
                      {"upper", lp.upper(j) ? json(to_string(*lp.upper(j))) : json(nullptr)}});
  }
  return {{"sense", lp.sense() == Sense::kMinimize ? "min" : "max"},
          {"objective", rationals_to_json(lp.objective())},
          {"constraints", constraints},
          {"bounds", bounds}};
}

json solution_to_json(const LPSolution& solution) {
  return {{"status", to_string(solution.status)},
          {"value", to_string(solution.value)},
          {"point", rationals_to_json(solution.point)},
          {"duals", rationals_to_json(solution.duals)},
          {"iterations", solution.iterations}};
}

json adversary_model_to_json(const AdversaryModel& model) {
  json strategies = json::array();
  for (const auto& s : model.strategies()) {
    strategies.push_back({{"behavior", rationals_to_json(s.behavior.values())}, {"inputs", rationals_to_json(s.inputs)}});
  }
  return {{"scenario", scenario_to_json(model.scenario())},
          {"encoding", "x-outer-a-inner"},
          {"prior", rationals_to_json(model.prior())},
          {"strategies", strategies}};
}

AdversaryModel adversary_model_from_json(const json& document) {
  Scenario scenario = scenario_from_json(require(document, "scenario", ""), "/scenario");
  auto prior = rationals_from_json(require(document, "prior", ""), "/prior");
  const json& list = require(document, "strategies", "");
  if (!list.is_array()) throw ParseError("/strategies", "expected an array");
  std::vector<AdversaryStrategy> strategies;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "/strategies/" + std::to_string(i);
    auto values = rationals_from_json(require(list[i], "behavior", where), where + "/behavior");
    if (values.size() != scenario.size()) throw ParseError(where + "/behavior", "wrong number of entries");
    auto inputs = rationals_from_json(require(list[i], "inputs", where), where + "/inputs");
    strategies.push_back({Behavior(scenario, std::move(values)), std::move(inputs)});
  }
  return AdversaryModel(std::move(scenario), std::move(strategies), std::move(prior));
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw StructuralError("row width does not match the table");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
    out << '\n';
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
}

json table_to_json(const Table& table) {
  json out = json::array();
  for (const auto& row : table.rows) {
    json object = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) object[table.columns[i]] = row[i];
    out.push_back(std::move(object));
  }
  return out;
}

Table monogamy_table(const MonogamyReport& report) {
  Table t{{"k", "x_k", "x_{N+1}", "m", "t", "lhs", "bound", "slack"}, {}};
  for (const auto& r : report.records) {
    t.add_row({std::to_string(r.party), std::to_string(r.party_setting), std::to_string(r.outsider_setting),
               r.shift ? std::to_string(*r.shift) : "", to_string(r.bell_value), to_string(r.lhs),
               to_string(r.bound), to_string(r.slack)});
  }
  return t;
}

Table tightness_table(const std::vector<TightnessRow>& rows) {
  Table t{{"t", "feasible", "lp_max", "bound", "tight"}, {}};
  for (const auto& r : rows) {
    t.add_row({to_string(r.target), r.feasible ? "true" : "false", optional_rational(r.lp_max), to_string(r.bound),
               r.tight ? "true" : "false"});
  }
  return t;
}

Table feasibility_table(const FeasibilityCurve& curve) {
  Table t{{"N", "d", "epsilon", "M", "r", "exponent", "I_Q", "rhs_bound", "variant"}, {}};
  for (const auto& r : curve.rows) {
    t.add_row({std::to_string(r.parties), std::to_string(r.outcomes), format_double(r.epsilon),
               std::to_string(r.settings), std::to_string(r.rounds), std::to_string(r.exponent),
               format_double(r.violation), format_double(r.rhs_bound), to_string(r.variant)});
  }
  return t;
}

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

}  // namespace monolab
