#include "monolab_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "monolab/bell.hpp"
#include "monolab/errors.hpp"
#include "monolab/io.hpp"
#include "monolab/monogamy.hpp"
#include "monolab/parallel.hpp"
#include "monolab/polylp.hpp"
#include "monolab/quantum.hpp"
#include "monolab/svamp.hpp"

namespace monolab::cli {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string mode = "exact";
  double tol = 1e-9;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out;
  std::string format;

  bool exact() const { return mode == "exact"; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> values;
  for (const auto& s : split(text)) values.push_back(parse_rational(s));
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const auto& s : split(text)) {
    const Rational v = parse_rational(s);
    if (v.get_den() != 1) throw StructuralError("expected an integer, got " + s);
    values.push_back(static_cast<int>(v.get_num().get_si()));
  }
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& s : split(text)) values.push_back(to_double(parse_rational(s)));
  return values;
}

void emit_table(std::ostream& sink, const Table& table, const std::string& format) {
  if (format == "json") {
    sink << table_to_json(table).dump(2) << '\n';
  } else {
    write_csv(sink, table);
  }
}

void emit_report(std::ostream& sink, const json& report, const std::string& format) {
  if (format == "csv") {
    Table t{{"quantity", "value"}, {}};
    for (const auto& [key, value] : report.items()) {
      t.add_row({key, value.is_string() ? value.get<std::string>() : value.dump()});
    }
    write_csv(sink, t);
  } else {
    sink << report.dump(2) << '\n';
  }
}

std::uint64_t resolve_seed(const RunConfig& config, std::ostream& err) {
  if (config.seed) return *config.seed;
  const std::uint64_t seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
  err << "seed: " << seed << '\n';
  return seed;
}

// validate -----------------------------------------------------------------

int cmd_validate(const RunConfig& config, const std::string& path, std::ostream& sink) {
  const Behavior behavior = parse_behavior(read_file(path));
  json report = {{"scenario", scenario_to_json(behavior.scenario())}, {"mode", config.mode}};
  json violations = json::array();
  bool valid = false;
  bool nonsignalling = false;
  auto kind_name = [](ViolationKind k) { return k == ViolationKind::kNegative ? "negative" : "normalization"; };
  if (config.exact()) {
    auto v = validate(behavior);
    for (const auto& item : v.violations) {
      violations.push_back({{"kind", kind_name(item.kind)},
                            {"setting_index", item.setting_index},
                            {"outcome_index", item.outcome_index},
                            {"amount", to_string(item.amount)}});
    }
    valid = v.ok();
    auto ns = check_nonsignalling(behavior);
    nonsignalling = ns.nonsignalling;
    report["worst_signalling"] = to_string(ns.worst_violation);
  } else {
    const FloatBehavior fb = to_float(behavior);
    auto v = validate(fb, config.tol);
    for (const auto& item : v.violations) {
      violations.push_back({{"kind", kind_name(item.kind)},
                            {"setting_index", item.setting_index},
                            {"outcome_index", item.outcome_index},
                            {"amount", item.amount}});
    }
    valid = v.ok();
    auto ns = check_nonsignalling(fb, config.tol);
    nonsignalling = ns.nonsignalling;
    report["worst_signalling"] = ns.worst_violation;
  }
  report["valid"] = valid;
  report["violations"] = violations;
  report["nonsignalling"] = nonsignalling;
  if (config.format == "csv") {
    Table t{{"check", "result"}, {}};
    t.add_row({"valid", valid ? "true" : "false"});
    t.add_row({"nonsignalling", nonsignalling ? "true" : "false"});
    t.add_row({"worst_signalling", report["worst_signalling"].is_string()
                                       ? report["worst_signalling"].get<std::string>()
                                       : report["worst_signalling"].dump()});
    write_csv(sink, t);
  } else {
    sink << report.dump(2) << '\n';
  }
  return valid ? kSuccess : kVerificationFailure;
}

// bell -----------------------------------------------------------------------

int cmd_bell(const RunConfig& config, int n, int m, int d, const std::string& behavior_path, bool ns_minimizer,
             std::ostream& sink) {
  const BellFunctional f = recursive_bkp(n, m, d);
  if (behavior_path.empty() && !ns_minimizer) {
    if (config.format == "csv") {
      write_functional_csv(sink, f);
    } else {
      sink << functional_to_json(f).dump(2) << '\n';
    }
    return kSuccess;
  }
  std::optional<Behavior> behavior;
  if (ns_minimizer) {
    auto opt = optimize_over_ns(f.scenario(), f.dense(), Sense::kMinimize);
    behavior = *opt.behavior;
  } else {
    behavior = parse_behavior(read_file(behavior_path));
  }
  if (!(behavior->scenario() == f.scenario())) throw StructuralError("behavior scenario does not match N, M, d");
  json report = {{"functional", f.name()}};
  if (config.exact()) {
    report["value"] = to_string(evaluate(f, *behavior));
  } else {
    report["value"] = format_double(evaluate(f, to_float(*behavior)));
  }
  report["classical_bound"] = to_string(*f.classical_bound);
  report["ns_minimum"] = to_string(*f.ns_minimum);
  emit_report(sink, report, config.format);
  return kSuccess;
}

// tightness / monogamy ---------------------------------------------------------

int cmd_tightness(const RunConfig& config, int n, int m, int d, int party, int party_setting, int outsider_setting,
                  const std::string& grid_text, std::ostream& sink) {
  const Scenario scenario(n, m, d);
  const auto grid = grid_text.empty() ? default_tightness_grid(d) : parse_rational_list(grid_text);
  const auto rows = tightness_scan(scenario, party, party_setting, outsider_setting, grid, config.jobs);
  emit_table(sink, tightness_table(rows), config.format.empty() ? "csv" : config.format);
  const bool violated =
      std::any_of(rows.begin(), rows.end(), [](const TightnessRow& r) { return r.lp_max && *r.lp_max > r.bound; });
  return violated ? kVerificationFailure : kSuccess;
}

int cmd_monogamy(const RunConfig& config, const std::string& path, std::ostream& sink) {
  const auto report = monogamy_report(parse_behavior(read_file(path)));
  emit_table(sink, monogamy_table(report), config.format.empty() ? "csv" : config.format);
  return report.all_satisfied() ? kSuccess : kVerificationFailure;
}

// figures ----------------------------------------------------------------------

int cmd_figure_2a(const RunConfig& config, int parties, int d, int points, std::ostream& sink) {
  if (points < 2) throw StructuralError("need at least two grid points");
  std::vector<Rational> grid;
  for (int i = 0; i < points; ++i) grid.push_back(make_rational(static_cast<std::int64_t>(d - 1) * i, points - 1));
  const Rational saturation = prior_bound_saturation(parties, d);
  if (saturation <= d - 1) grid.push_back(saturation);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  Table t{{"I", "bound_monogamy", "bound_prior"}, {}};
  for (const auto& value : grid) {
    if (config.exact()) {
      t.add_row({to_string(value), to_string(guessing_bound(value, d)),
                 to_string(guessing_bound_prior(value, parties, d))});
    } else {
      const double v = to_double(value);
      t.add_row({format_double(v), format_double(guessing_bound(v, d)),
                 format_double(guessing_bound_prior(v, parties, d))});
    }
  }
  emit_table(sink, t, config.format.empty() ? "csv" : config.format);
  return kSuccess;
}

int cmd_figure_2b(const RunConfig& config, int d_min, int d_max, const std::vector<double>& rates, int max_settings,
                  std::ostream& err, std::ostream& sink) {
  if (d_min < 2 || d_max < d_min) throw StructuralError("need 2 <= d-min <= d-max");
  if (rates.empty()) throw StructuralError("need at least one target rate");
  ViolationOptions options;
  options.minimize.seed = resolve_seed(config, err);

  struct Cell {
    std::optional<int> monogamy;
    std::optional<int> prior;
  };
  const std::size_t dims = static_cast<std::size_t>(d_max - d_min + 1);
  std::vector<std::vector<Cell>> cells(dims, std::vector<Cell>(rates.size()));
  parallel_for(dims, config.jobs, [&](std::size_t i) {
    const int d = d_min + static_cast<int>(i);
    const double ceiling = std::log2(static_cast<double>(d));
    // Violations are computed once per d and shared by both bounds.
    std::vector<double> violations;
    for (std::size_t r = 0; r < rates.size(); ++r) {
      if (rates[r] >= ceiling) continue;
      auto reached = [&](GuessingBoundKind kind) { return min_settings(violations, d, rates[r], kind); };
      while (static_cast<int>(violations.size()) + 1 < max_settings &&
             (!reached(GuessingBoundKind::kMonogamy) || !reached(GuessingBoundKind::kPrior))) {
        violations.push_back(chained_quantum_violation(static_cast<int>(violations.size()) + 2, d, options).value);
      }
      cells[i][r] = {reached(GuessingBoundKind::kMonogamy), reached(GuessingBoundKind::kPrior)};
    }
  });

  Table t{{"d", "R_target", "minM_monogamy", "minM_prior"}, {}};
  auto cell = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("unreachable"); };
  for (std::size_t r = 0; r < rates.size(); ++r) {
    for (std::size_t i = 0; i < dims; ++i) {
      t.add_row({std::to_string(d_min + static_cast<int>(i)), format_double(rates[r]), cell(cells[i][r].monogamy),
                 cell(cells[i][r].prior)});
    }
  }
  emit_table(sink, t, config.format.empty() ? "csv" : config.format);
  return kSuccess;
}

// ra / theorem3 ---------------------------------------------------------------

int cmd_ra(const RunConfig& config, int parties, int d, const std::string& epsilon_text,
           const std::vector<int>& settings, std::optional<double> lambda, std::ostream& err, std::ostream& sink) {
  const double epsilon = to_double(parse_rational(epsilon_text));
  if (!(epsilon >= 0 && epsilon < 0.5)) throw StructuralError("epsilon must lie in [0, 1/2)");
  if (parties > 2 && !lambda) throw StructuralError("N > 2 needs --lambda (violations are computed for N = 2 only)");
  const double independent = critical_epsilon(parties);
  const double common = critical_epsilon_common(parties);

  std::function<double(int)> violation;
  if (lambda) {
    violation = [l = *lambda](int m) { return l / m; };
  } else {
    ViolationOptions options;
    options.minimize.seed = resolve_seed(config, err);
    std::vector<double> cache(settings.size());
    parallel_for(settings.size(), config.jobs,
                 [&](std::size_t i) { cache[i] = chained_quantum_violation(settings[i], d, options).value; });
    violation = [cache, settings](int m) {
      return cache[static_cast<std::size_t>(std::find(settings.begin(), settings.end(), m) - settings.begin())];
    };
  }
  const FeasibilityCurve curve = feasibility_curve(parties, d, epsilon, settings, violation);

  std::string verdict = "above both thresholds";
  if (epsilon < std::min(independent, common)) {
    verdict = "below both thresholds";
  } else if (epsilon < std::max(independent, common)) {
    verdict = "between thresholds";
  }
  const Table table = feasibility_table(curve);
  if (config.format == "json") {
    json report = {{"N", parties},
                   {"d", d},
                   {"epsilon", epsilon},
                   {"epsilon_N", independent},
                   {"epsilon_common", common},
                   {"verdict", verdict},
                   {"independent_decreasing", curve.independent_decreasing},
                   {"common_decreasing", curve.common_decreasing},
                   {"curve", table_to_json(table)}};
    sink << report.dump(2) << '\n';
  } else {
    Table summary{{"quantity", "value"}, {}};
    summary.add_row({"epsilon_N", format_double(independent)});
    summary.add_row({"epsilon_common", format_double(common)});
    summary.add_row({"verdict", verdict});
    summary.add_row({"independent_decreasing", curve.independent_decreasing ? "true" : "false"});
    summary.add_row({"common_decreasing", curve.common_decreasing ? "true" : "false"});
    write_csv(sink, summary);
    sink << '\n';
    write_csv(sink, table);
  }
  return kSuccess;
}

int cmd_theorem3(const RunConfig& config, int n, int m, int d, std::size_t models, const std::string& epsilon_text,
                 std::size_t max_strategies, const std::string& model_path, std::ostream& err, std::ostream& sink) {
  std::vector<AdversaryModel> list;
  if (!model_path.empty()) {
    json document;
    try {
      document = json::parse(read_file(model_path));
    } catch (const json::parse_error& e) {
      throw ParseError(model_path, e.what());
    }
    list.push_back(adversary_model_from_json(document));
  } else {
    const Scenario scenario(n, m, d);
    const BellFunctional f = recursive_bkp(n, m, d);
    std::vector<Behavior> pool{*optimize_over_ns(scenario, f.dense(), Sense::kMinimize).behavior};
    std::mt19937_64 rng(resolve_seed(config, err));
    ModelGenerationOptions options;
    options.epsilon = parse_rational(epsilon_text);
    options.max_strategies = max_strategies;
    for (std::size_t i = 0; i < models; ++i) list.push_back(random_adversary_model(scenario, pool, rng, options));
  }

  struct Tally {
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::size_t unbounded = 0;
  };
  std::vector<Tally> tallies(list.size());
  parallel_for(list.size(), config.jobs, [&](std::size_t i) {
    const auto& model = list[i];
    for (std::size_t x = 0; x < model.scenario().setting_tuples(); ++x) {
      for (int k = 0; k < model.scenario().parties(); ++k) {
        const auto check = variational_bound(model, x, k);
        ++tallies[i].checks;
        if (!check.q) ++tallies[i].unbounded;
        if (!check.satisfied) ++tallies[i].violations;
      }
    }
  });
  Tally total;
  for (const auto& t : tallies) {
    total.checks += t.checks;
    total.violations += t.violations;
    total.unbounded += t.unbounded;
  }
  json report = {{"models", list.size()},
                 {"checks", total.checks},
                 {"violations", total.violations},
                 {"unbounded", total.unbounded}};
  emit_report(sink, report, config.format);
  return total.violations == 0 ? kSuccess : kVerificationFailure;
}

// quantum ---------------------------------------------------------------------

int cmd_theorem4(const RunConfig& config, std::size_t samples, const std::vector<double>& alphas, std::ostream& err,
                 std::ostream& sink) {
  std::mt19937_64 rng(resolve_seed(config, err));
  std::vector<RealPureState> states;
  states.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) states.push_back(random_real_state(3, rng));

  Table t{{"alpha", "samples", "violations", "worst_slack", "unconverged"}, {}};
  bool any_violation = false;
  for (double alpha : alphas) {
    std::vector<Theorem4Report> reports(samples);
    parallel_for(samples, config.jobs, [&](std::size_t i) { reports[i] = check_theorem4(states[i], alpha); });
    std::size_t violations = 0;
    std::size_t unconverged = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
      if (!r.satisfied()) ++violations;
      if (!r.converged) ++unconverged;
      worst = std::min(worst, r.worst_slack());
    }
    any_violation = any_violation || violations > 0;
    t.add_row({format_double(alpha), std::to_string(samples), std::to_string(violations), format_double(worst),
               std::to_string(unconverged)});
  }
  emit_table(sink, t, config.format.empty() ? "json" : config.format);
  return any_violation ? kVerificationFailure : kSuccess;
}

int cmd_family_sweep(const RunConfig& config, double alpha, int points, std::ostream& sink) {
  if (points < 2) throw StructuralError("need at least two sweep points");
  Table t{{"theta", "bell_value", "correlation", "residual"}, {}};
  bool saturated = true;
  for (int i = 0; i < points; ++i) {
    const double theta = std::numbers::pi / 4 * i / (points - 1);
    const auto p = saturation_point(theta, alpha);
    saturated = saturated && std::abs(p.residual) <= config.tol;
    t.add_row({format_double(p.theta), format_double(p.bell_value), format_double(p.correlation),
               format_double(p.residual)});
  }
  emit_table(sink, t, config.format.empty() ? "csv" : config.format);
  return saturated ? kSuccess : kVerificationFailure;
}

int cmd_violation(const RunConfig& config, int m, int d, std::ostream& err, std::ostream& sink) {
  ViolationOptions options;
  options.minimize.seed = resolve_seed(config, err);
  const auto v = chained_quantum_violation(m, d, options);
  json report = {{"M", m}, {"d", d}, {"value", v.value}, {"converged", v.converged}, {"refined", v.refined}};
  emit_report(sink, report, config.format);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monogamy of nonlocal correlations: verification and scan tool", "monogamy-lab"};
  app.require_subcommand(1);
  RunConfig config;
  std::uint64_t seed_value = 0;
  app.option_defaults()->always_capture_default();
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mode", config.mode, "Numeric mode")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--tol", config.tol, "Tolerance for float mode")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed_value, "Random seed");
    sub->add_option("--jobs", config.jobs, "Worker threads (0 = all cores)");
    sub->add_option("--out", config.out, "Write output to this file");
    sub->add_option("--format", config.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  std::function<int(std::ostream&)> action;

  std::string path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a behavior file for validity and no-signalling");
  validate_cmd->add_option("file", path, "Behavior JSON")->required();
  add_common(validate_cmd);
  validate_cmd->callback([&] { action = [&](std::ostream& s) { return cmd_validate(config, path, s); }; });

  int n = 2;
  int m = 2;
  int d = 2;
  bool ns_minimizer = false;
  auto* bell_cmd = app.add_subcommand("bell", "Export the N-party functional or evaluate it on a behavior");
  bell_cmd->add_option("N", n)->required();
  bell_cmd->add_option("M", m)->required();
  bell_cmd->add_option("d", d)->required();
  bell_cmd->add_option("--behavior", path, "Behavior JSON to evaluate");
  bell_cmd->add_flag("--ns-minimizer", ns_minimizer, "Evaluate on the no-signalling minimizer");
  add_common(bell_cmd);
  bell_cmd->callback([&] { action = [&](std::ostream& s) { return cmd_bell(config, n, m, d, path, ns_minimizer, s); }; });

  int party = 0;
  int party_setting = 0;
  int outsider_setting = 0;
  std::string grid;
  auto* tight_cmd = app.add_subcommand("tightness", "LP scan of the agreement bound against the Bell value");
  tight_cmd->add_option("N", n)->required();
  tight_cmd->add_option("M", m)->required();
  tight_cmd->add_option("d", d)->required();
  tight_cmd->add_option("k", party, "Party index (0-based)")->required();
  tight_cmd->add_option("x_k", party_setting)->required();
  tight_cmd->add_option("x_out", outsider_setting, "Outsider setting")->required();
  tight_cmd->add_option("--grid", grid, "Comma separated targets, e.g. 0,1/4,1");
  add_common(tight_cmd);
  tight_cmd->callback([&] {
    action = [&](std::ostream& s) {
      return cmd_tightness(config, n, m, d, party, party_setting, outsider_setting, grid, s);
    };
  });

  auto* mono_cmd = app.add_subcommand("monogamy", "Evaluate every monogamy relation on a behavior");
  mono_cmd->add_option("file", path, "Behavior JSON")->required();
  add_common(mono_cmd);
  mono_cmd->callback([&] { action = [&](std::ostream& s) { return cmd_monogamy(config, path, s); }; });

  std::string which;
  int points = 0;
  int d_min = 2;
  int d_max = 6;
  std::string rates = "1";
  int max_settings = 256;
  int parties = 2;
  auto* fig_cmd = app.add_subcommand("figures", "Figure datasets: 2a guessing bounds, 2b minimal settings");
  fig_cmd->add_option("which", which)->required()->check(CLI::IsMember({"2a", "2b"}));
  fig_cmd->add_option("--d", d, "Outcomes (2a)");
  fig_cmd->add_option("--parties", parties, "Parties (2a)");
  fig_cmd->add_option("--points", points, "Grid points on [0, d-1] (2a)");
  fig_cmd->add_option("--d-min", d_min, "Smallest d (2b)");
  fig_cmd->add_option("--d-max", d_max, "Largest d (2b)");
  fig_cmd->add_option("--rates", rates, "Comma separated target rates (2b)");
  fig_cmd->add_option("--max-settings", max_settings, "Largest M tried (2b)");
  add_common(fig_cmd);
  fig_cmd->callback([&] {
    action = [&](std::ostream& s) {
      if (which == "2a") return cmd_figure_2a(config, parties, d, points ? points : 21, s);
      return cmd_figure_2b(config, d_min, d_max, parse_double_list(rates), max_settings, err, s);
    };
  });

  std::string epsilon = "1/20";
  std::string settings = "2,4,8,16";
  double lambda = 0.0;
  auto* ra_cmd = app.add_subcommand("ra", "Amplification thresholds and feasibility curve");
  ra_cmd->add_option("N", parties)->required();
  ra_cmd->add_option("d", d)->required();
  ra_cmd->add_option("epsilon", epsilon)->required();
  ra_cmd->add_option("--settings", settings, "Comma separated M values");
  ra_cmd->add_option("--lambda", lambda, "Use lambda / M in place of computed violations");
  add_common(ra_cmd);
  ra_cmd->callback([&] {
    action = [&](std::ostream& s) {
      std::optional<double> proxy;
      if (ra_cmd->count("--lambda") > 0) proxy.emplace(lambda);
      return cmd_ra(config, parties, d, epsilon, parse_int_list(settings), proxy, err, s);
    };
  });

  std::size_t models = 200;
  std::size_t max_strategies = 8;
  std::string model_path;
  auto* t3_cmd = app.add_subcommand("theorem3", "Monte-Carlo check of the variational bound on adversary models");
  t3_cmd->add_option("N", n)->required();
  t3_cmd->add_option("M", m)->required();
  t3_cmd->add_option("d", d)->required();
  t3_cmd->add_option("--models", models, "Number of random models");
  t3_cmd->add_option("--epsilon", epsilon, "Source bias of the inputs");
  t3_cmd->add_option("--max-strategies", max_strategies, "Largest strategy count");
  t3_cmd->add_option("--model", model_path, "Check one model from a JSON file instead");
  add_common(t3_cmd);
  t3_cmd->callback([&] {
    action = [&](std::ostream& s) {
      return cmd_theorem3(config, n, m, d, models, epsilon, max_strategies, model_path, err, s);
    };
  });

  std::size_t samples = 10'000;
  std::string alphas = "1,1.5,2,3";
  double alpha = 1.0;
  auto* q_cmd = app.add_subcommand("quantum", "Qubit monogamy checks and chained violations");
  q_cmd->require_subcommand(1);
  auto* q_t4 = q_cmd->add_subcommand("theorem4", "Random three-qubit states against both relations");
  q_t4->add_option("--samples", samples);
  q_t4->add_option("--alpha", alphas, "Comma separated alpha values");
  add_common(q_t4);
  q_t4->callback([&] {
    action = [&](std::ostream& s) { return cmd_theorem4(config, samples, parse_double_list(alphas), err, s); };
  });
  auto* q_sweep = q_cmd->add_subcommand("family-sweep", "Saturating family over theta in [0, pi/4]");
  q_sweep->add_option("--alpha", alpha);
  q_sweep->add_option("--points", points, "Number of theta values");
  add_common(q_sweep);
  q_sweep->callback([&] {
    action = [&](std::ostream& s) { return cmd_family_sweep(config, alpha, points ? points : 50, s); };
  });
  auto* q_viol = q_cmd->add_subcommand("violation", "Quantum value of the chained functional");
  q_viol->add_option("M", m)->required();
  q_viol->add_option("d", d)->required();
  add_common(q_viol);
  q_viol->callback([&] { action = [&](std::ostream& s) { return cmd_violation(config, m, d, err, s); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    const int code = app.exit(e, help_out, err);
    out << help_out.str();
    return code == 0 ? kSuccess : kInputError;
  }
  for (auto* sub : {validate_cmd, bell_cmd, tight_cmd, mono_cmd, fig_cmd, ra_cmd, t3_cmd, q_t4, q_sweep, q_viol}) {
    if (sub->count("--seed") > 0) config.seed = seed_value;
  }

  try {
    std::ostringstream buffer;
    const int code = action(buffer);
    if (config.out.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(config.out, std::ios::binary);
      if (!file) throw ParseError(config.out, "cannot open output file");
      file << buffer.str();
    }
    if (code == kVerificationFailure) err << "verification failed\n";
    return code;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapacityExceeded;
  } catch (const HypothesisError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace monolab::cli
