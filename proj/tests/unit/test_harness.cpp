#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dchain/errors.hpp"
#include "dchain/harness/report.hpp"
#include "dchain/harness/scenario.hpp"
#include "dchain/harness/suites.hpp"

using namespace dchain;
using namespace dchain::harness;

namespace {

const std::string kMinimal = R"(name: t
seed: 3
system:
  builtin: ns_circle
  parameters: [0.5]
grid:
  resolutions: [180, 360]
deltas: [2, 1]
suites: [components]
)";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.name == "t");
  CHECK(s.seed == 3);
  CHECK(s.system.builtin == "ns_circle");
  CHECK(s.system.parameters == std::vector<double>{0.5});
  CHECK(s.resolutions == std::vector<int>{180, 360});
  CHECK(s.deltas == std::vector<double>{2, 1});
  CHECK(s.delta_unit == DeltaUnit::cells);
  CHECK(s.suites == std::vector<std::string>{"components"});
  CHECK(s.config_hash == fnv1a_hex(kMinimal));
  CHECK(s.system.label() == "ns_circle(0.5)");
}

TEST_CASE("scenario diagnostics carry line, column and field") {
  std::string bad = kMinimal;
  bad.replace(bad.find("deltas: [2, 1]"), 14, "deltas: [1, 2]");
  const auto e = error_of(bad);
  CHECK(e.rfind("8:", 0) == 0);
  CHECK(e.find("deltas: must be strictly decreasing") != std::string::npos);

  CHECK(error_of(kMinimal + "colour: red\n").find("unknown key 'colour'") != std::string::npos);
  CHECK(error_of(kMinimal + "colour: red\n").rfind("10:1:", 0) == 0);

  std::string unknown = kMinimal;
  unknown.replace(unknown.find("ns_circle"), 9, "nope");
  CHECK(error_of(unknown).find("system.builtin") != std::string::npos);

  std::string suite = kMinimal;
  suite.replace(suite.find("[components]"), 12, "[components, warp]");
  CHECK(error_of(suite).find("unknown suite 'warp'") != std::string::npos);

  std::string dup = kMinimal;
  dup.replace(dup.find("[components]"), 12, "[components, components]");
  CHECK(error_of(dup).find("duplicate suite") != std::string::npos);

  std::string res = kMinimal;
  res.replace(res.find("[180, 360]"), 10, "[360, 180]");
  CHECK(error_of(res).find("grid.resolutions: must be strictly increasing") != std::string::npos);

  std::string neg = kMinimal;
  neg.replace(neg.find("deltas: [2, 1]"), 14, "deltas: [2, -1]");
  CHECK(error_of(neg).find("deltas: must be positive") != std::string::npos);

  CHECK(error_of("").find("empty document") != std::string::npos);
  CHECK(error_of("name: x\n").find("system") != std::string::npos);
  CHECK(error_of(kMinimal + "output:\n  formats: [xml]\n").find("output.formats") != std::string::npos);
  CHECK(error_of(kMinimal + "attractors:\n  - {arc: [2, 1]}\n").find("attractors") != std::string::npos);
}

TEST_CASE("suite prerequisites") {
  const std::string no_grid = "system:\n  builtin: ns_circle\nsuites: [components]\n";
  CHECK(error_of(no_grid).find("grid.resolutions") != std::string::npos);
  const std::string digraph = "system:\n  random_digraph: {nodes: 6, density: 0.3, seed: 2}\nsuites: [oracle]\n";
  CHECK_NOTHROW(parse_scenario(digraph));
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.yaml"), ConfigError);
}

TEST_CASE("every shipped config parses") {
  for (const auto& e : std::filesystem::directory_iterator(DCHAIN_CONFIG_DIR)) {
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_scenario(e.path().string()));
  }
}

TEST_CASE("empty suite list gives an empty passing report") {
  Scenario s = parse_scenario("name: empty\nsystem:\n  builtin: identity\nsuites: []\n");
  const Report r = run_scenario(s);
  CHECK(r.checks.empty());
  CHECK(r.exit_code() == 0);
  const Json j = to_json(r);
  CHECK(j["summary"]["checks"] == 0);
  CHECK(j["provenance"]["scenario"] == "empty");
  CHECK(lines(checks_csv(r)) == 1);
  CHECK(lines(series_csv(r)) == 1);
}

TEST_CASE("report exit codes and formats") {
  Report r;
  r.scenario = "x";
  r.add({"components", "a", "s", {{"n", 1}}, Verdict::pass, "ok, \"quoted\"", {}});
  r.add({"components", "b", "s", {}, Verdict::hypotheses_not_met, "", {}});
  CHECK(r.exit_code() == 0);
  r.add({"components", "c", "s", {}, Verdict::resolution_insufficient, "", {}});
  CHECK(r.exit_code() == 3);
  r.add({"components", "d", "s", {}, Verdict::fail, "", {}});
  CHECK(r.exit_code() == 1);
  CHECK(r.count(Verdict::pass) == 1);

  const std::string csv = checks_csv(r);
  CHECK(lines(csv) == 5);
  CHECK(csv.find("\"ok, \"\"quoted\"\"\"") != std::string::npos);

  r.add_series("counts", {{"n", 180}, {"k", 2}});
  r.add_series("counts", {{"n", 360}, {"k", 2}});
  r.add_series("other", {{"z", 1.5}});
  const std::string ser = series_csv(r);
  CHECK(ser.substr(0, ser.find('\n')) == "series,n,k,z");
  CHECK(lines(ser) == 4);
  CHECK(ser.find("other,,,1.5") != std::string::npos);

  const Report back = from_json(to_json(r));
  CHECK(to_json(back).dump() == to_json(r).dump());
  CHECK(text_summary(r).find("fail") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "dchain_report_test";
  std::filesystem::remove_all(dir);
  const auto files = emit_report(r, dir.string(), {"json", "csv", "text"});
  CHECK(files.size() == 4);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "summary.txt"));
}

TEST_CASE("components suite on the north-south map") {
  Scenario s = load_scenario(std::string(DCHAIN_CONFIG_DIR) + "/ns_minimal.yaml");
  const Report r = run_scenario(s);
  CHECK(r.exit_code() == 0);
  CHECK(r.count(Verdict::fail) == 0);
  REQUIRE(r.series.contains("component_counts"));
  CHECK(r.series["component_counts"][0]["components"] == 2);
}
