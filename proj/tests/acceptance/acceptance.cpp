// One line per acceptance criterion; exit status 1 if any line fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dchain/errors.hpp"
#include "dchain/harness/oracle.hpp"
#include "dchain/harness/report.hpp"
#include "dchain/harness/scenario.hpp"
#include "dchain/harness/suites.hpp"
#include "dchain/parallel.hpp"
#include "dchain/rng.hpp"

using namespace dchain;
using namespace dchain::harness;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [" << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Sys {
  std::shared_ptr<const CellMap> F;
  ChainGraph g;
  ChainDecomposition d;
};

Sys decompose(const std::string& name, std::vector<double> params, int n, double eps_cells = 5) {
  const auto f = builtin(name, params);
  auto F = std::make_shared<const CellMap>(build_cell_map(f, grid_for(f, n)));
  auto g = build_chain_graph(F, F->space().spacing());
  auto d = classify_components(g, chain_components(g), eps_cells * F->space().spacing());
  return {F, g, d};
}

double angle_of(const GridSpace& X, const CellSet& C) {
  double s = 0, c = 0;
  C.for_each([&](Cell x) {
    s += std::sin(X.center(x)(0));
    c += std::cos(X.center(x)(0));
  });
  const double a = std::atan2(s, c);
  return a < 0 ? a + 2 * pi : a;
}

bool near_angle(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2 * pi);
  return std::min(d, 2 * pi - d) < 0.1;
}

// Transitive closure by Warshall over bit rows, independent of the engine.
std::vector<std::vector<bool>> closure_matrix(const ChainGraph& g) {
  const std::size_t n = g.cell_count();
  std::vector<std::vector<bool>> R(n, std::vector<bool>(n, false));
  for (Cell a = 0; a < n; ++a)
    for (Cell b : g.successors(a)) R[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (R[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (R[k][j]) R[i][j] = true;
  return R;
}

// Components, terminal and initial flags from the closure matrix.
std::string oracle_mismatch(const Sys& s) {
  const auto R = closure_matrix(s.g);
  const auto& X = s.g.space();
  const std::size_t n = s.g.cell_count();
  const double eps = s.d.epsilon;
  std::vector<int> comp(n, -1);
  std::vector<std::vector<Cell>> comps;
  for (Cell a = 0; a < n; ++a) {
    if (!R[a][a] || comp[a] >= 0) continue;
    std::vector<Cell> cls;
    for (Cell b = 0; b < n; ++b)
      if (R[a][b] && R[b][a]) cls.push_back(b);
    // A lone self-loop counts only if the cell can stay within delta of itself.
    if (cls.size() == 1 && s.F->displacement_floor(a) > s.g.delta()) continue;
    for (Cell b : cls) comp[b] = static_cast<int>(comps.size());
    comps.push_back(std::move(cls));
  }
  if (comps.size() != s.d.size()) return "component count";
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const CellSet C = CellSet::from_cells(n, comps[i]);
    if (!(C == s.d.at(i))) return "component cells";
    auto stable = [&](bool forward) {
      const CellSet near = closed_neighborhood(X, C, eps);
      for (Cell a : comps[i])
        for (Cell b = 0; b < n; ++b) {
          const bool r = forward ? R[a][b] : R[b][a];
          if (!r) continue;
          if (comp[b] >= 0 && comp[b] != static_cast<int>(i)) return false;
          if (!near.contains(b)) return false;
        }
      return true;
    };
    if (stable(true) != s.d.info[i].is_terminal) return "terminal flag";
    if (stable(false) != s.d.info[i].is_initial) return "initial flag";
  }
  return "";
}

const Check* find_check(const Report& r, const std::string& name, const std::string& system, int resolution = -1) {
  for (const auto& c : r.checks)
    if (c.name == name && c.system == system &&
        (resolution < 0 || (c.params.contains("resolution") && c.params["resolution"] == resolution)))
      return &c;
  return nullptr;
}

Scenario grid_scenario(const std::string& builtin_name, std::vector<int> resolutions) {
  Scenario s;
  s.name = "acceptance_" + builtin_name;
  s.seed = 7;
  s.system.builtin = builtin_name;
  s.resolutions = std::move(resolutions);
  s.deltas = {1};
  return s;
}

USpec arc(double lo, double hi) {
  USpec u;
  u.kind = USpec::Kind::arc;
  u.lo = lo;
  u.hi = hi;
  return u;
}

// ---------------------------------------------------------------- criteria

void c1(Outcome& o) {
  for (const auto& [name, param, expected] :
       std::vector<std::tuple<std::string, double, std::size_t>>{{"ns_circle", 0.5, 2}, {"ms4_circle", 0.3, 4}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Sys s = decompose(name, {param}, 720);
    const double secs = seconds_since(t0);
    o.require(secs < 5, name + " runtime");
    o.require(s.d.size() == expected, name + " component count");
    const auto& X = s.g.space();
    for (std::size_t i = 0; i < s.d.size(); ++i) {
      const double a = angle_of(X, s.d.at(i));
      const bool sink = near_angle(a, 0) || (name == "ms4_circle" && near_angle(a, pi));
      o.require(s.d.info[i].is_terminal == sink && s.d.info[i].is_initial == !sink, name + " classification");
    }
    o.note << ' ' << name << ' ' << s.d.size() << " comps " << secs * 1000 << "ms;";
    const std::string bad = oracle_mismatch(decompose(name, {param}, 90));
    o.require(bad.empty(), name + " oracle n=90: " + bad);
  }
  o.note << " oracle n=90 agrees";
}

void c2(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Sys s = decompose("cat_torus", {}, 101);
  o.require(s.d.size() == 1, "single component");
  if (s.d.size() == 1) {
    o.require(s.d.at(0) == CellSet::full(101 * 101), "component is every cell");
    o.require(s.d.info[0].is_initial && s.d.info[0].is_terminal, "initial and terminal");
    o.require(is_clopen(s.g.space(), s.d.at(0)), "clopen");
  }
  o.require(is_chain_mixing(s.g), "chain mixing");
  Report r;
  run_suite("theorem_1_1", grid_scenario("cat_torus", {101}), r);
  for (const char* name : {"lemma_4_3_initial_terminal", "lemma_2_4_clopen_in_cr", "clopen", "chain_mixing",
                           "lambda_is_space"}) {
    const Check* c = find_check(r, name, "cat_torus");
    o.require(c && c->verdict == Verdict::pass, std::string("sub-verdict ") + name);
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60, "runtime");
  o.note << " 1 component, mixing, lemma 4.3/2.4 pass, " << std::to_string(secs).substr(0, 5) << "s";
}

void c3(Outcome& o) {
  const auto cat = builtin("cat_torus");
  const auto H = hyperbolic_splitting(*cat.linear_part);
  const double delta = 1e-8, bound = H.K * delta;
  const std::size_t chains = 1000;
  std::vector<double> sup(chains, 0);
  std::vector<char> ok(chains, 0);
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(chains, [&](std::size_t i) {
    Rng rng(mix_seed(11, i));
    const Point x0 = point2(rng.uniform(), rng.uniform());
    const auto po = generate_pseudo_orbit(cat, x0, 10000, delta, i % 2 ? Noise::adversarial : Noise::uniform,
                                          mix_seed(12, i));
    const auto sh = shadow_linear_hyperbolic(H, po);
    sup[i] = sh.certificate.sup_error;
    ok[i] = sh.certificate.verified && sh.certificate.sup_error <= bound;
  }, 1);
  const double secs = seconds_since(t0);
  const auto failures = std::count(ok.begin(), ok.end(), 0);
  o.require(failures == 0, std::to_string(failures) + " solver failures");
  o.require(secs < 30, "runtime");
  o.note << " K=" << H.K << ", worst sup/delta " << *std::max_element(sup.begin(), sup.end()) / delta << ", "
         << std::to_string(secs).substr(0, 5) << "s;";

  int agree = 0;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(mix_seed(13, t));
    const auto po = generate_pseudo_orbit(cat, point2(rng.uniform(), rng.uniform()), 4 + t % 9, 1e-3,
                                          t % 2 ? Noise::adversarial : Noise::uniform, mix_seed(14, t));
    const double solver = shadow_linear_hyperbolic(H, po).certificate.sup_error;
    const double brute = minimax_shadow_error(cat, po);
    const double rel = std::abs(solver - brute) / brute;
    worst = std::max(worst, rel);
    agree += rel <= 0.1;
  }
  o.require(agree == 100, "minimax agreement");
  o.note << " minimax " << agree << "/100 within 10% (worst " << worst << ")";
}

void c4(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s = grid_scenario("ms4_circle", {180, 360, 720});
  s.system.parameters = {0.3};
  SystemSpec id;
  id.builtin = "identity";
  s.controls = {id};
  s.attractors = {arc(-0.3, pi + 0.3)};
  s.epsilons = {5};
  Report r;
  run_suite("theorem_1_2", s, r);
  for (int n : {180, 360, 720}) {
    const Check* c = find_check(r, "boundary_chain_stable", "ms4_circle(0.3)", n);
    o.require(c && c->verdict == Verdict::pass, "harness verdict n=" + std::to_string(n));
    // Direct check of the escape radius.
    const Sys m = decompose("ms4_circle", {0.3}, n);
    const auto A = attractor_from_trapping(m.g, TrappingRegion{arc(-0.3, pi + 0.3).realize(m.g.space())});
    const auto rep = verify_boundary_chain_stable(m.g, A, 5 * m.g.delta(), true);
    o.require(rep.stable && rep.escape_radius <= 5 * m.g.delta(), "escape radius n=" + std::to_string(n));
    o.note << " n=" << n << " escape " << rep.escape_radius / m.g.delta() << "δ;";
  }
  bool control = false;
  for (const auto& c : r.checks)
    if (c.system == "identity") {
      control = true;
      o.require(c.verdict == Verdict::hypotheses_not_met, "identity control verdict");
    }
  o.require(control, "identity control present");
  const double secs = seconds_since(t0);
  o.require(secs < 20, "runtime");
  o.note << " identity hypotheses-not-met, " << std::to_string(secs).substr(0, 5) << "s";
}

void c5(Outcome& o) {
  int insufficient = 0;
  auto contain = [&](const Sys& s, const CellSet& S, const std::string& label) {
    const double a = 10 * s.g.space().spacing();
    try {
      const auto r = attractor_from_chain_stable(s.g, S, a);
      const bool ok = S.is_subset_of(r.attractor.lambda) &&
                      r.attractor.lambda.is_subset_of(closed_neighborhood(s.g.space(), S, a));
      o.require(ok, label + " containment");
      o.note << ' ' << label << " |S|=" << S.count() << " |Λ|=" << r.attractor.lambda.count() << ';';
    } catch (const ResolutionInsufficient&) {
      ++insufficient;
    }
  };
  const Sys ns = decompose("ns_circle", {0.5}, 720);
  for (std::size_t i = 0; i < ns.d.size(); ++i)
    if (near_angle(angle_of(ns.g.space(), ns.d.at(i)), 0)) contain(ns, ns.d.at(i), "ns 0-component");
  const Sys ms = decompose("ms4_circle", {0.3}, 720);
  const auto S = attractor_from_trapping(*ms.F, TrappingRegion{arc(-0.3, pi + 0.3).realize(ms.g.space())}).lambda;
  contain(ms, S, "ms4 arc");

  // The harness suite over the same systems.
  Scenario a = grid_scenario("ns_circle", {720});
  a.system.parameters = {0.5};
  a.attractors = {arc(-0.5, 0.5)};
  Scenario b = grid_scenario("ms4_circle", {720});
  b.system.parameters = {0.3};
  b.attractors = {arc(-0.3, pi + 0.3)};
  for (const Scenario* sc : {&a, &b}) {
    Report r;
    run_suite("lemma_5_2", *sc, r);
    insufficient += static_cast<int>(r.count(Verdict::resolution_insufficient));
    o.require(r.count(Verdict::fail) == 0, sc->system.builtin + " suite failures");
    o.require(r.count(Verdict::pass) > 0, sc->system.builtin + " suite passes");
  }
  o.require(insufficient == 0, std::to_string(insufficient) + " resolution-insufficient");
  o.note << " resolution-insufficient " << insufficient;
}

void c6(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> densities{0.1, 0.2, 0.4};
  const int graphs = 1008;  // nodes 1..12 x 3 densities x 28 seeds
  std::vector<char> agree(graphs, 0);
  std::vector<long> queries(graphs, 0);
  parallel_for(graphs, [&](std::size_t k) {
    const int i = static_cast<int>(k);
    const int n = 1 + i % 12;
    const double p = densities[(i / 12) % 3];
    const auto g = random_digraph(n, p, mix_seed(21, i));
    const auto res = corollary_5_3(g);
    agree[i] = res.ok();
    queries[i] = res.queries;
  }, 1);
  const double secs = seconds_since(t0);
  const auto good = std::count(agree.begin(), agree.end(), 1);
  o.require(good == graphs, "agreement");
  o.require(secs < 10, "runtime");
  o.note << ' ' << good << '/' << graphs << " digraphs agree, " << std::accumulate(queries.begin(), queries.end(), 0L)
         << " queries, " << std::to_string(secs).substr(0, 5) << "s";
}

void c7(Outcome& o) {
  const auto study = boundary_refinement_study(builtin("ms4_circle", {0.3}), arc(-0.3, pi + 0.3), {360, 720}, 60);
  for (const auto& L : study.levels) {
    o.require(L.boundary_components == 2, "count at n=" + std::to_string(L.resolution));
    o.require(L.band_entry >= 0 && L.band_entry <= 50, "band entry at n=" + std::to_string(L.resolution));
    o.require(L.band_ok, "band kept at n=" + std::to_string(L.resolution));
    o.note << " n=" << L.resolution << " count " << L.boundary_components << " band at " << L.band_entry << ';';
  }
  o.require(study.count_stable, "count stable");
}

void c8(Outcome& o) {
  const int n = 360;
  const auto X = GridSpace::circle(n);
  for (const std::string name : {"identity", "rotation_circle"}) {
    for (double eps : {0.01, 0.001}) {
      const auto m = estimate_shadowing_modulus(builtin(name), X, CellSet::full(n), eps, 4, 10L * n, 31);
      o.require(m.delta_estimate < kModulusCollapse, name + " modulus at eps " + std::to_string(eps));
      o.note << ' ' << name << " eps " << eps << " modulus " << m.delta_estimate << ';';
    }
  }
  const double id = estimate_expansivity(builtin("identity"), X, CellSet::full(n), 30, 32).e_estimate;
  const auto T = GridSpace::torus2(101);
  const double cat = estimate_expansivity(builtin("cat_torus"), T, CellSet::full(T.cell_count()), 30, 32).e_estimate;
  o.require(id < 1e-3, "identity expansivity");
  o.require(cat >= kExpansivityBaseline, "cat expansivity baseline");
  o.note << " expansivity identity " << id << ", cat " << cat;
}

void c9(Outcome& o) {
  const Scenario s = load_scenario(std::string(DCHAIN_CONFIG_DIR) + "/cat_torus_full.yaml");
  const Report a = run_scenario(s), b = run_scenario(s);
  Json ja = to_json(a), jb = to_json(b);
  ja.erase("timing");
  jb.erase("timing");
  o.require(ja.dump(2) == jb.dump(2), "report.json differs");
  o.require(checks_csv(a) == checks_csv(b) && series_csv(a) == series_csv(b), "csv differs");
  o.require(a.count(Verdict::fail) == 0, "full scenario has failures");
  o.note << ' ' << a.checks.size() << " checks, identical excluding timing";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"chain decomposition", c1}, {"clopen mixing component", c2}, {"linear shadowing bound", c3},
      {"boundary chain stability", c4}, {"chain stable attractor", c5}, {"digraph equivalence", c6},
      {"boundary refinement", c7}, {"negative controls", c8}, {"determinism", c9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("C%zu %s  %s:%s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.note.str().c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
