#include "dchain/harness/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dchain/errors.hpp"

namespace dchain::harness {

namespace {

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& field, const std::string& msg) {
  const auto m = n.Mark();
  std::ostringstream os;
  if (m.is_null())
    os << "?:?";
  else
    os << m.line + 1 << ':' << m.column + 1;
  os << ": " << field << ": " << msg;
  throw ConfigError(os.str());
}

void allow_keys(const YAML::Node& n, const std::string& field, std::initializer_list<const char*> keys) {
  if (!n.IsMap()) fail_at(n, field, "expected a mapping");
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      fail_at(kv.first, field, "unknown key '" + k + "'");
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail_at(n, field, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail_at(n, field, "bad value '" + n.Scalar() + "'");
  }
}

template <class T>
std::vector<T> list(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) fail_at(n, field, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(scalar<T>(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

SystemSpec parse_system(const YAML::Node& n, const std::string& field) {
  allow_keys(n, field, {"builtin", "parameters", "random_digraph"});
  SystemSpec s;
  if (n["builtin"]) s.builtin = scalar<std::string>(n["builtin"], field + ".builtin");
  if (n["parameters"]) s.parameters = list<double>(n["parameters"], field + ".parameters");
  if (const auto d = n["random_digraph"]) {
    allow_keys(d, field + ".random_digraph", {"nodes", "density", "seed"});
    DigraphSpec g;
    if (d["nodes"]) g.nodes = scalar<int>(d["nodes"], field + ".random_digraph.nodes");
    if (d["density"]) g.density = scalar<double>(d["density"], field + ".random_digraph.density");
    if (d["seed"]) g.seed = scalar<std::uint64_t>(d["seed"], field + ".random_digraph.seed");
    if (g.nodes < 1 || g.nodes > 16) fail_at(d, field + ".random_digraph.nodes", "must be in 1..16");
    if (!(g.density >= 0 && g.density <= 1)) fail_at(d, field + ".random_digraph.density", "must be in [0, 1]");
    s.digraph = g;
  }
  if (s.builtin.empty() == !s.digraph) fail_at(n, field, "give exactly one of builtin or random_digraph");
  if (!s.builtin.empty()) {
    try {
      (void)builtin(s.builtin, s.parameters);
    } catch (const ConfigError& e) {
      fail_at(n["builtin"], field + ".builtin", e.what());
    }
  }
  return s;
}

USpec parse_uspec(const YAML::Node& n, const std::string& field) {
  USpec u;
  if (n.IsScalar()) {
    if (n.Scalar() != "all") fail_at(n, field, "expected 'all' or a mapping");
    return u;
  }
  allow_keys(n, field, {"arc", "ball", "cells"});
  if (n.size() != 1) fail_at(n, field, "give exactly one of arc, ball, cells");
  if (const auto a = n["arc"]) {
    const auto v = list<double>(a, field + ".arc");
    if (v.size() != 2 || !(v[0] < v[1])) fail_at(a, field + ".arc", "expected [lo, hi] with lo < hi");
    u.kind = USpec::Kind::arc;
    u.lo = v[0];
    u.hi = v[1];
  } else if (const auto b = n["ball"]) {
    allow_keys(b, field + ".ball", {"center", "radius"});
    if (!b["center"] || !b["radius"]) fail_at(b, field + ".ball", "needs center and radius");
    const auto c = list<double>(b["center"], field + ".ball.center");
    if (c.empty() || c.size() > 2) fail_at(b["center"], field + ".ball.center", "one or two coordinates");
    u.kind = USpec::Kind::ball;
    u.center = c.size() == 1 ? point1(c[0]) : point2(c[0], c[1]);
    u.radius = scalar<double>(b["radius"], field + ".ball.radius");
    if (!(u.radius > 0)) fail_at(b["radius"], field + ".ball.radius", "must be positive");
  } else {
    u.kind = USpec::Kind::cells;
    for (auto c : list<long>(n["cells"], field + ".cells")) {
      if (c < 0) fail_at(n["cells"], field + ".cells", "negative cell index");
      u.cells.push_back(static_cast<Cell>(c));
    }
  }
  return u;
}

}  // namespace

std::string SystemSpec::label() const {
  if (digraph) {
    std::ostringstream os;
    os << "random_digraph(n=" << digraph->nodes << ",p=" << digraph->density << ",seed=" << digraph->seed << ')';
    return os.str();
  }
  std::string s = builtin;
  if (!parameters.empty()) {
    s += '(';
    for (std::size_t i = 0; i < parameters.size(); ++i) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, parameters[i]);
      s += (i ? "," : "") + std::string(buf, res.ptr);
    }
    s += ')';
  }
  return s;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "components",       "refinement",  "theorem_1_1", "theorem_1_2",       "lemma_5_2", "corollaries_5",
      "appendix_a",       "shadowing_linear", "lemma_2_1", "negative_controls", "oracle"};
  return names;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << e.mark.line + 1 << ':' << e.mark.column + 1 << ": yaml: " << e.msg;
    throw ConfigError(os.str());
  }
  Scenario s;
  s.config_hash = fnv1a_hex(text);
  if (root.IsNull()) throw ConfigError("1:1: scenario: empty document");
  allow_keys(root, "scenario",
             {"name", "seed", "system", "controls", "grid", "deltas", "delta_unit", "epsilons", "attractors", "a_values",
              "iterations", "suites", "shadowing", "oracle", "expect", "output"});
  if (root["name"]) s.name = scalar<std::string>(root["name"], "name");
  if (root["seed"]) s.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (!root["system"]) fail_at(root, "system", "missing");
  s.system = parse_system(root["system"], "system");
  if (const auto c = root["controls"]) {
    if (!c.IsSequence()) fail_at(c, "controls", "expected a list");
    for (std::size_t i = 0; i < c.size(); ++i)
      s.controls.push_back(parse_system(c[i], "controls[" + std::to_string(i) + "]"));
  }
  if (const auto g = root["grid"]) {
    allow_keys(g, "grid", {"resolutions"});
    if (g["resolutions"]) s.resolutions = list<int>(g["resolutions"], "grid.resolutions");
    for (std::size_t i = 0; i < s.resolutions.size(); ++i) {
      if (s.resolutions[i] < 1) fail_at(g["resolutions"][i], "grid.resolutions", "must be positive");
      if (i && s.resolutions[i] <= s.resolutions[i - 1])
        fail_at(g["resolutions"][i], "grid.resolutions", "must be strictly increasing");
    }
  }
  if (const auto d = root["deltas"]) {
    s.deltas = list<double>(d, "deltas");
    for (std::size_t i = 0; i < s.deltas.size(); ++i) {
      if (!(s.deltas[i] > 0)) fail_at(d[i], "deltas", "must be positive");
      if (i && !(s.deltas[i] < s.deltas[i - 1])) fail_at(d[i], "deltas", "must be strictly decreasing");
    }
  }
  if (const auto u = root["delta_unit"]) {
    const auto v = scalar<std::string>(u, "delta_unit");
    if (v == "cells")
      s.delta_unit = DeltaUnit::cells;
    else if (v == "metric")
      s.delta_unit = DeltaUnit::metric;
    else
      fail_at(u, "delta_unit", "expected cells or metric");
  }
  if (const auto e = root["epsilons"]) {
    s.epsilons = list<double>(e, "epsilons");
    for (std::size_t i = 0; i < s.epsilons.size(); ++i)
      if (!(s.epsilons[i] >= 0)) fail_at(e[i], "epsilons", "must be nonnegative");
  }
  if (const auto a = root["attractors"]) {
    if (!a.IsSequence()) fail_at(a, "attractors", "expected a list");
    for (std::size_t i = 0; i < a.size(); ++i)
      s.attractors.push_back(parse_uspec(a[i], "attractors[" + std::to_string(i) + "]"));
  }
  if (const auto a = root["a_values"]) {
    s.a_values = list<double>(a, "a_values");
    for (std::size_t i = 0; i < s.a_values.size(); ++i)
      if (!(s.a_values[i] > 0)) fail_at(a[i], "a_values", "must be positive");
  }
  if (const auto it = root["iterations"]) {
    s.iterations = scalar<int>(it, "iterations");
    if (s.iterations < 1) fail_at(it, "iterations", "must be positive");
  }
  if (const auto q = root["suites"]) {
    s.suites = list<std::string>(q, "suites");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.suites.size(); ++i) {
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), s.suites[i]) == names.end())
        fail_at(q[i], "suites", "unknown suite '" + s.suites[i] + "'");
      if (!seen.insert(s.suites[i]).second) fail_at(q[i], "suites", "duplicate suite '" + s.suites[i] + "'");
    }
  }
  if (const auto sh = root["shadowing"]) {
    allow_keys(sh, "shadowing",
               {"b", "c", "trials", "chain_length", "epsilon", "linear_chains", "linear_length", "linear_delta", "region"});
    auto& o = s.shadowing;
    if (sh["b"]) o.b = scalar<double>(sh["b"], "shadowing.b");
    if (sh["c"]) o.c = scalar<double>(sh["c"], "shadowing.c");
    if (sh["trials"]) o.trials = scalar<int>(sh["trials"], "shadowing.trials");
    if (sh["chain_length"]) o.chain_length = scalar<long>(sh["chain_length"], "shadowing.chain_length");
    if (sh["epsilon"]) o.epsilon = scalar<double>(sh["epsilon"], "shadowing.epsilon");
    if (sh["linear_chains"]) o.linear_chains = scalar<int>(sh["linear_chains"], "shadowing.linear_chains");
    if (sh["linear_length"]) o.linear_length = scalar<long>(sh["linear_length"], "shadowing.linear_length");
    if (sh["linear_delta"]) o.linear_delta = scalar<double>(sh["linear_delta"], "shadowing.linear_delta");
    if (sh["region"]) o.region = parse_uspec(sh["region"], "shadowing.region");
    if (!(o.b > 0 && o.b < o.c)) fail_at(sh, "shadowing", "need 0 < b < c");
    if (o.trials < 1) fail_at(sh, "shadowing.trials", "must be at least 1");
    if (o.chain_length < 1 || o.linear_length < 1) fail_at(sh, "shadowing", "chain lengths must be positive");
    if (!(o.linear_delta > 0 && o.linear_delta < 0.1)) fail_at(sh, "shadowing.linear_delta", "must be in (0, 0.1)");
  }
  if (const auto o = root["oracle"]) {
    allow_keys(o, "oracle", {"nodes", "densities", "seeds"});
    if (o["nodes"]) s.oracle.nodes = list<int>(o["nodes"], "oracle.nodes");
    if (o["densities"]) s.oracle.densities = list<double>(o["densities"], "oracle.densities");
    if (o["seeds"]) s.oracle.seeds = scalar<int>(o["seeds"], "oracle.seeds");
    for (int n : s.oracle.nodes)
      if (n < 1 || n > 16) fail_at(o["nodes"], "oracle.nodes", "must be in 1..16");
    for (double p : s.oracle.densities)
      if (!(p >= 0 && p <= 1)) fail_at(o["densities"], "oracle.densities", "must be in [0, 1]");
  }
  if (const auto e = root["expect"]) {
    allow_keys(e, "expect", {"components"});
    if (e["components"]) s.expect.components = scalar<std::size_t>(e["components"], "expect.components");
  }
  if (const auto o = root["output"]) {
    allow_keys(o, "output", {"dir", "formats"});
    if (o["dir"]) s.output_dir = scalar<std::string>(o["dir"], "output.dir");
    if (o["formats"]) {
      s.formats = list<std::string>(o["formats"], "output.formats");
      for (std::size_t i = 0; i < s.formats.size(); ++i)
        if (s.formats[i] != "json" && s.formats[i] != "csv" && s.formats[i] != "text")
          fail_at(o["formats"][i], "output.formats", "expected json, csv or text");
    }
  }
  validate(s);
  return s;
}

void validate(const Scenario& s) {
  const bool needs_grid = !s.system.digraph && std::any_of(s.suites.begin(), s.suites.end(), [](const auto& n) {
    return n != "oracle" && n != "shadowing_linear" && n != "negative_controls";
  });
  if (needs_grid && s.resolutions.empty()) throw ConfigError("?:?: grid.resolutions: required by the selected suites");
  if (!s.suites.empty() && s.deltas.empty() && needs_grid) throw ConfigError("?:?: deltas: required by the selected suites");
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot read");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    Scenario s = parse_scenario(buf.str());
    if (const char* dir = std::getenv("DCHAIN_OUTPUT_DIR"); dir && *dir) s.output_dir = dir;
    return s;
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.what());
  }
}

}  // namespace dchain::harness
