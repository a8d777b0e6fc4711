#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dchain/attractors.hpp"

namespace dchain::harness {

struct DigraphSpec {
  int nodes = 8;
  double density = 0.2;
  std::uint64_t seed = 1;
};

struct SystemSpec {
  std::string builtin;  // empty for random digraphs
  std::vector<double> parameters;
  std::optional<DigraphSpec> digraph;

  std::string label() const;
};

enum class DeltaUnit { cells, metric };

struct ShadowingSettings {
  double b = 0.1, c = 0.2;
  int trials = 4;
  long chain_length = 200;
  double epsilon = 0.01;
  // Linear solver batch.
  int linear_chains = 20;
  long linear_length = 1000;
  double linear_delta = 1e-8;
  // Region for the L-shadowing pipeline.
  USpec region;
};

struct OracleSettings {
  std::vector<int> nodes{12};
  std::vector<double> densities{0.1, 0.2, 0.4};
  int seeds = 100;
};

struct Expectations {
  std::optional<std::size_t> components;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  SystemSpec system;
  std::vector<SystemSpec> controls;
  std::vector<int> resolutions;
  std::vector<double> deltas;
  DeltaUnit delta_unit = DeltaUnit::cells;
  std::vector<double> epsilons;  // same unit as deltas
  std::vector<USpec> attractors;
  std::vector<double> a_values{10};  // same unit as deltas
  int iterations = 60;
  std::vector<std::string> suites;
  ShadowingSettings shadowing;
  OracleSettings oracle;
  Expectations expect;
  std::string output_dir = "out";
  std::vector<std::string> formats{"json", "csv"};
  std::string config_hash;  // of the source text
};

const std::vector<std::string>& suite_names();

// Throws ConfigError with "line:column: field: message" diagnostics.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
void validate(const Scenario& s);

std::string fnv1a_hex(const std::string& text);

}  // namespace dchain::harness
