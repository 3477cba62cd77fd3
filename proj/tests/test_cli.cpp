#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "monolab/io.hpp"
#include "monolab/polylp.hpp"
#include "monolab_cli/cli.hpp"

using namespace monolab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  fs::create_directories(MONOLAB_TEST_SCRATCH);
  return (fs::path(MONOLAB_TEST_SCRATCH) / name).string();
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = scratch(name);
  std::ofstream(path) << text;
  return path;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cell_stream(line);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("validate") {
  const auto uniform = write("uniform.json", behavior_to_json(Behavior::uniform(Scenario(2, 2, 2))).dump());
  auto ok = run_cli({"validate", uniform});
  CHECK(ok.code == 0);
  auto report = nlohmann::json::parse(ok.out);
  CHECK(report["valid"] == true);
  CHECK(report["nonsignalling"] == true);

  const auto broken = write("broken.json", "{\"scenario\": {\"N\": 2,\n \"M\": 2 \"d\": 2}}");
  auto bad = run_cli({"validate", broken});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);

  Scenario sc(2, 2, 2);
  std::vector<Rational> probs(sc.size(), Rational(0));
  for (std::size_t x = 0; x < 4; ++x) {
    auto xs = sc.setting_tuple(x);
    probs[sc.index(std::vector<int>{0, xs[0]}, xs)] = 1;
  }
  const auto signalling = write("signalling.json", behavior_to_json(Behavior(sc, probs)).dump());
  auto sig = run_cli({"validate", signalling});
  CHECK(sig.code == 0);
  CHECK(nlohmann::json::parse(sig.out)["nonsignalling"] == false);

  probs[0] = 2;
  const auto invalid = write("invalid.json", behavior_to_json(Behavior(sc, probs)).dump());
  CHECK(run_cli({"validate", invalid}).code == 1);
  CHECK(run_cli({"validate", invalid, "--mode", "float", "--tol", "1e-9"}).code == 1);
  CHECK(run_cli({"validate", uniform, "--mode", "float", "--format", "csv"}).out.find("nonsignalling,true") !=
        std::string::npos);
  CHECK(run_cli({"validate", scratch("missing.json")}).code == 2);
}

TEST_CASE("bell") {
  auto minimizer = run_cli({"bell", "2", "2", "2", "--ns-minimizer"});
  CHECK(minimizer.code == 0);
  CHECK(nlohmann::json::parse(minimizer.out)["value"] == "0");

  auto exported = run_cli({"bell", "3", "2", "2"});
  CHECK(exported.code == 0);
  auto doc = nlohmann::json::parse(exported.out);
  CHECK(doc["classical_bound"] == "1");
  CHECK(doc["terms"].size() == 8);
  CHECK(run_cli({"bell", "3", "2", "2", "--format", "csv"}).out.rfind("setting_index,", 0) == 0);

  DeterministicAssignment zeros{{{0, 0}, {0, 0}}};
  const auto vertex = write("zero_vertex.json", behavior_to_json(deterministic_vertex(Scenario(2, 2, 3), zeros)).dump());
  auto value = run_cli({"bell", "2", "2", "3", "--behavior", vertex});
  CHECK(value.code == 0);
  CHECK(nlohmann::json::parse(value.out)["value"] == "2");
  auto csv = run_cli({"bell", "2", "2", "3", "--behavior", vertex, "--format", "csv", "--mode", "float"});
  CHECK(csv.out.find("value,2") != std::string::npos);
  CHECK(run_cli({"bell", "2", "2", "2", "--behavior", vertex}).code == 2);
}

TEST_CASE("size cap exceeded exits with 3") {
  ::setenv("MONOGAMY_LAB_CAP", "100", 1);
  auto capped = run_cli({"bell", "4", "2", "2"});
  ::unsetenv("MONOGAMY_LAB_CAP");
  CHECK(capped.code == 3);
  CHECK(run_cli({"bell", "4", "2", "2"}).code == 0);
}

TEST_CASE("input errors exit with 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({"bell", "2", "2"}).code == 2);
  CHECK(run_cli({"bell", "2", "2", "1"}).code == 2);
  CHECK(run_cli({"bell", "2", "2", "2", "--mode", "fuzzy"}).code == 2);
  CHECK(run_cli({"ra", "2", "2", "0.7"}).code == 2);
  CHECK(run_cli({"ra", "3", "2", "0.1"}).code == 2);
  auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("tightness") != std::string::npos);
}

TEST_CASE("tightness") {
  for (const char* d : {"2", "3"}) {
    auto scan = run_cli({"tightness", "3", "2", d, "0", "0", "1", "--jobs", "2"});
    CHECK(scan.code == 0);
    auto rows = csv_rows(scan.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"t", "feasible", "lp_max", "bound", "tight"});
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "true");
  }
  auto outside = run_cli({"tightness", "3", "2", "2", "1", "1", "0", "--grid", "-1/2,1/3,3/2"});
  auto rows = csv_rows(outside.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][1] == "false");
  CHECK(rows[2] == std::vector<std::string>{"1/3", "true", "2/3", "2/3", "true"});
  CHECK(rows[3][1] == "false");
}

TEST_CASE("monogamy report") {
  std::mt19937_64 rng(2);
  const auto path = write("random322.json", behavior_to_json(random_ns_behavior(Scenario(3, 2, 2), rng)).dump());
  auto r = run_cli({"monogamy", path});
  CHECK(r.code == 0);
  auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"k", "x_k", "x_{N+1}", "m", "t", "lhs", "bound", "slack"});
  CHECK(rows.size() == 1 + 8 + 16);
}

TEST_CASE("figures") {
  auto fig = run_cli({"figures", "2a", "--d", "3", "--points", "10"});
  CHECK(fig.code == 0);
  auto rows = csv_rows(fig.out);
  CHECK(rows[0] == std::vector<std::string>{"I", "bound_monogamy", "bound_prior"});
  CHECK(rows[1] == std::vector<std::string>{"0", "1/3", "1/3"});
  bool saturation_seen = false;
  for (const auto& row : rows) {
    if (row[0] == "8/9") {
      saturation_seen = true;
      CHECK(row[2] == "1");
    }
  }
  CHECK(saturation_seen);
  auto fl = run_cli({"figures", "2a", "--d", "2", "--points", "3", "--mode", "float", "--format", "json"});
  auto doc = nlohmann::json::parse(fl.out);
  CHECK(doc[0]["bound_prior"] == "0.5");
  CHECK(doc[2]["bound_monogamy"] == "1");

  auto b = run_cli({"figures", "2b", "--d-min", "2", "--d-max", "4", "--seed", "1"});
  CHECK(b.code == 0);
  auto brows = csv_rows(b.out);
  REQUIRE(brows.size() == 4);
  CHECK(brows[1] == std::vector<std::string>{"2", "1", "unreachable", "unreachable"});
  CHECK(std::stoi(brows[3][2]) <= std::stoi(brows[2][2]));
  CHECK(std::stoi(brows[2][2]) <= std::stoi(brows[2][3]));
}

TEST_CASE("ra") {
  auto two = run_cli({"ra", "2", "2", "0.05", "--seed", "4"});
  CHECK(two.code == 0);
  CHECK(two.out.find("epsilon_N,0.0857864376269") != std::string::npos);
  CHECK(two.out.find("epsilon_common,0.1666666666666") != std::string::npos);
  CHECK(two.out.find("verdict,below both thresholds") != std::string::npos);
  CHECK(two.out.find("independent_decreasing,true") != std::string::npos);
  CHECK(run_cli({"ra", "2", "2", "0.2", "--seed", "4"}).out.find("verdict,above both thresholds") !=
        std::string::npos);
  auto mid = nlohmann::json::parse(run_cli({"ra", "2", "2", "0.12", "--seed", "4", "--format", "json"}).out);
  CHECK(mid["verdict"] == "between thresholds");
  CHECK(mid["common_decreasing"] == true);
  CHECK(mid["independent_decreasing"] == false);
  auto three = nlohmann::json::parse(run_cli({"ra", "3", "2", "0.01", "--lambda", "1", "--format", "json"}).out);
  CHECK(three["epsilon_N"].get<double>() < 0.0857);
  CHECK(three["curve"].size() == 8);
}

TEST_CASE("theorem3") {
  auto r = run_cli({"theorem3", "2", "2", "2", "--models", "10", "--seed", "9", "--jobs", "2"});
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["violations"] == 0);
  CHECK(doc["checks"] == 10 * 4 * 2);

  Scenario sc(2, 2, 2);
  std::mt19937_64 rng(1);
  std::vector<Behavior> pool;
  const auto model = write("model.json", adversary_model_to_json(random_adversary_model(sc, pool, rng)).dump());
  auto replay = run_cli({"theorem3", "2", "2", "2", "--model", model});
  CHECK(replay.code == 0);
  CHECK(nlohmann::json::parse(replay.out)["models"] == 1);
}

TEST_CASE("quantum subcommands") {
  auto v = run_cli({"quantum", "violation", "2", "2", "--seed", "1"});
  CHECK(v.code == 0);
  CHECK(nlohmann::json::parse(v.out)["value"].get<double>() == doctest::Approx(0.58579).epsilon(1e-5));

  auto sweep = run_cli({"quantum", "family-sweep", "--alpha", "1", "--points", "5"});
  CHECK(sweep.code == 0);
  auto rows = csv_rows(sweep.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"theta", "bell_value", "correlation", "residual"});

  auto t4 = run_cli({"quantum", "theorem4", "--samples", "20", "--alpha", "1,2", "--seed", "3"});
  CHECK(t4.code == 0);
  auto doc = nlohmann::json::parse(t4.out);
  REQUIRE(doc.size() == 2);
  CHECK(doc[0]["violations"] == "0");
}

TEST_CASE("seeded runs are reproducible and logged") {
  const std::vector<std::string> args{"quantum", "theorem4", "--samples", "5", "--alpha", "1.5", "--seed", "42"};
  auto first = run_cli(args);
  auto second = run_cli(args);
  CHECK(first.out == second.out);
  auto unseeded = run_cli({"theorem3", "2", "2", "2", "--models", "2"});
  CHECK(unseeded.err.rfind("seed: ", 0) == 0);

  const auto path = scratch("t3.json");
  auto to_file = run_cli({"theorem3", "2", "2", "2", "--models", "3", "--seed", "5", "--out", path});
  CHECK(to_file.out.empty());
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == run_cli({"theorem3", "2", "2", "2", "--models", "3", "--seed", "5"}).out);
}
