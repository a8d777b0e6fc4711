#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "dchain/errors.hpp"
#include "dchain/harness/oracle.hpp"
#include "dchain/harness/report.hpp"
#include "dchain/harness/scenario.hpp"
#include "dchain/harness/suites.hpp"

using namespace dchain;
using namespace dchain::harness;

namespace {

constexpr int kConfigError = 2;

int finish(const Report& r, const std::string& dir, const std::vector<std::string>& formats) {
  for (const auto& p : emit_report(r, dir, formats)) std::cerr << "wrote " << p << '\n';
  std::cout << text_summary(r);
  return r.exit_code();
}

// Default attractor regions for ad hoc verification.
std::vector<USpec> default_regions(const std::string& system) {
  USpec u;
  if (system == "ms4_circle") {
    u.kind = USpec::Kind::arc;
    u.lo = -0.3;
    u.hi = std::numbers::pi + 0.3;
  } else if (system == "ns_circle") {
    u.kind = USpec::Kind::arc;
    u.lo = -0.5;
    u.hi = 0.5;
  } else if (system == "square_interval") {
    u.kind = USpec::Kind::ball;
    u.center = point1(0);
    u.radius = 0.5;
  } else if (system == "identity" || system == "rotation_circle") {
    u.kind = USpec::Kind::arc;
    u.lo = 0;
    u.hi = 1;
  }
  return {u};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chain recurrence and shadowing experiments"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("config", config, "scenario YAML")->required();

  std::string suite, system = "cat_torus", out = "out/verify";
  int grid = 0;
  double delta = 1;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "run one suite on a builtin system");
  verify->add_option("suite", suite, "suite name")->required();
  verify->add_option("--system", system, "builtin system");
  verify->add_option("--grid", grid, "grid resolution");
  verify->add_option("--delta", delta, "delta in cells");
  verify->add_option("--seed", seed, "seed");
  verify->add_option("--out", out, "output directory");

  int nodes = 12, seeds = 100;
  double density = 0.2;
  auto* oracle = app.add_subcommand("oracle", "compare the engine with brute force on random digraphs");
  oracle->add_option("--nodes", nodes, "node count (1..16)");
  oracle->add_option("--density", density, "edge density");
  oracle->add_option("--seeds", seeds, "number of digraphs");
  oracle->add_option("--seed", seed, "base seed");

  std::string format = "text", input, report_out;
  auto* report = app.add_subcommand("report", "convert a report.json");
  report->add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  report->add_option("--out", report_out, "output directory")->required();
  report->add_option("--input", input, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      const Scenario s = load_scenario(config);
      return finish(run_scenario(s), s.output_dir, s.formats);
    }
    if (*verify) {
      Scenario s;
      s.name = "verify_" + suite + "_" + system;
      s.seed = seed;
      s.system.builtin = system;
      const PointMap f = builtin(system);
      if (grid <= 0) grid = f.domain == Domain::torus2 ? 101 : 720;
      s.resolutions = {grid};
      s.deltas = {delta};
      s.suites = {suite};
      s.attractors = default_regions(system);
      if (const auto& names = suite_names(); std::find(names.begin(), names.end(), suite) == names.end())
        throw ConfigError("unknown suite '" + suite + "'");
      s.config_hash = fnv1a_hex(s.name + " grid=" + std::to_string(grid) + " delta=" + std::to_string(delta));
      if (const char* dir = std::getenv("DCHAIN_OUTPUT_DIR"); dir && *dir) out = dir;
      return finish(run_scenario(s), out, {"json", "csv", "text"});
    }
    if (*oracle) {
      if (nodes < 1 || nodes > 16) throw ConfigError("--nodes must be in 1..16");
      if (!(density >= 0 && density <= 1)) throw ConfigError("--density must be in [0, 1]");
      Scenario s;
      s.name = "oracle";
      s.seed = seed;
      s.oracle.nodes = {nodes};
      s.oracle.densities = {density};
      s.oracle.seeds = seeds;
      Report r;
      r.scenario = s.name;
      r.seed = seed;
      run_suite("oracle", s, r);
      std::cout << text_summary(r);
      return r.exit_code();
    }
    if (*report) {
      std::ifstream in(input);
      if (!in) throw std::runtime_error(input + ": cannot read");
      const Report r = from_json(Json::parse(in));
      for (const auto& p : emit_report(r, report_out, {format})) std::cout << p << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ResolutionInsufficient& e) {
    std::cerr << "resolution insufficient: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
