#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "monolab/bell.hpp"
#include "monolab/errors.hpp"
#include "monolab/monogamy.hpp"
#include "monolab/polylp.hpp"
#include "monolab/scenario.hpp"
#include "monolab/svamp.hpp"

namespace monolab {

/// Malformed input document. `where` names the offending location: a
/// "line L, column C" for syntax errors or a JSON pointer for schema errors.
class ParseError : public StructuralError {
 public:
  ParseError(std::string where, const std::string& message)
      : StructuralError(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Behavior documents:
///
///   {"scenario": {"N": 2, "M": 2, "d": 2},
///    "encoding": "x-outer-a-inner",
///    "values": ["1/4", "1/4", ...]}
///
/// Values may be strings ("1/3", "0.25") or JSON numbers; both are read
/// exactly from their decimal text.
nlohmann::json behavior_to_json(const Behavior& behavior);
nlohmann::json behavior_to_json(const FloatBehavior& behavior);
Behavior behavior_from_json(const nlohmann::json& document);
/// Parses text first; syntax errors report line and column.
Behavior parse_behavior(std::string_view text);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& document, const std::string& where = "/scenario");

/// {"name", "scenario", "classical_bound", "ns_minimum", "terms": [...]}
nlohmann::json functional_to_json(const BellFunctional& functional);
BellFunctional functional_from_json(const nlohmann::json& document);

/// One row per nonzero dense coefficient:
/// setting_index,outcome_index,settings,outcomes,coefficient
void write_functional_csv(std::ostream& out, const BellFunctional& functional);

nlohmann::json lp_to_json(const LinearProgram& lp);
nlohmann::json solution_to_json(const LPSolution& solution);

nlohmann::json adversary_model_to_json(const AdversaryModel& model);
AdversaryModel adversary_model_from_json(const nlohmann::json& document);

/// A rectangular table of already formatted cells, written as CSV or as a
/// JSON array of objects keyed by column.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Quotes cells containing commas, quotes or newlines.
void write_csv(std::ostream& out, const Table& table);
nlohmann::json table_to_json(const Table& table);

/// k, x_k, x_{N+1}, m, t, lhs, bound, slack (m empty for the sum form,
/// t is the Bell value).
Table monogamy_table(const MonogamyReport& report);
/// t, feasible, lp_max, bound, tight
Table tightness_table(const std::vector<TightnessRow>& rows);
/// N, d, epsilon, M, r, exponent, I_Q, rhs_bound, variant
Table feasibility_table(const FeasibilityCurve& curve);

/// Shortest round-trip decimal text.
std::string format_double(double value);

}  // namespace monolab
