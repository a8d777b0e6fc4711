#include "dchain/harness/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <sstream>

#include "dchain/errors.hpp"
#include "dchain/harness/oracle.hpp"
#include "dchain/parallel.hpp"
#include "dchain/rng.hpp"

namespace dchain::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Json cells_json(const CellSet& S) {
  Json out = Json::array();
  long lo = -1, prev = -2;
  S.for_each([&](Cell c) {
    if (static_cast<long>(c) != prev + 1) {
      if (lo >= 0) out.push_back({lo, prev});
      lo = c;
    }
    prev = c;
  });
  if (lo >= 0) out.push_back({lo, prev});
  return out;
}

Json path_json(const std::vector<Cell>& p) {
  Json out = Json::array();
  for (Cell c : p) out.push_back(c);
  return out;
}

Json point_json(const Point& p) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(p[i]);
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Prerequisite verdicts gate a conclusion: unmet hypotheses are never upgraded.
Verdict gate(std::initializer_list<Verdict> prereqs, bool conclusion) {
  for (Verdict v : prereqs)
    if (v == Verdict::hypotheses_not_met) return Verdict::hypotheses_not_met;
  for (Verdict v : prereqs)
    if (v == Verdict::resolution_insufficient) return Verdict::resolution_insufficient;
  for (Verdict v : prereqs)
    if (v == Verdict::fail) return Verdict::hypotheses_not_met;
  return conclusion ? Verdict::pass : Verdict::fail;
}

Verdict met(bool b) { return b ? Verdict::pass : Verdict::hypotheses_not_met; }

struct System {
  SystemSpec spec;
  PointMap f;
  std::string label;
};

System make_system(const SystemSpec& spec) { return {spec, builtin(spec.builtin, spec.parameters), spec.label()}; }

struct Level {
  int n = 0;
  std::shared_ptr<const GridSpace> X;
  std::shared_ptr<const CellMap> F;
};

Level make_level(const PointMap& f, int n) {
  Level L;
  L.n = n;
  L.X = grid_for(f, n);
  L.F = std::make_shared<const CellMap>(build_cell_map(f, L.X));
  return L;
}

double to_metric(const Scenario& s, const GridSpace& X, double v) {
  return s.delta_unit == DeltaUnit::cells ? v * X.spacing() : v;
}

std::vector<double> epsilons_for(const Scenario& s, double delta_value) {
  if (s.epsilons.empty()) return {2 * delta_value};
  return s.epsilons;
}

Json level_params(const Scenario& s, int n, double delta, double eps = -1) {
  Json p;
  p["resolution"] = n;
  p["delta"] = delta;
  p["delta_unit"] = s.delta_unit == DeltaUnit::cells ? "cells" : "metric";
  if (eps >= 0) p["epsilon"] = eps;
  return p;
}

struct Support {
  bool certified = false;
  bool estimated = false;
  double value = 0;
  std::string label;
};

// Certificate from the exact solver for toral automorphisms; otherwise a
// labelled modulus estimate on the region.
Support shadowing_support(const PointMap& f, const GridSpace& X, const CellSet& region, const Scenario& s,
                          std::uint64_t seed) {
  Support out;
  if (f.linear_part) {
    const HyperbolicSplitting H = hyperbolic_splitting(*f.linear_part);
    bool all = true;
    double worst = 0;
    for (int t = 0; t < 4; ++t) {
      Rng rng(mix_seed(seed, t));
      const Point x0 = point2(rng.uniform(), rng.uniform());
      const PseudoOrbit po = generate_pseudo_orbit(f, x0, 1000, 1e-8, t % 2 ? Noise::adversarial : Noise::uniform,
                                                   mix_seed(seed, 100 + t));
      const LinearShadow sh = shadow_linear_hyperbolic(H, po);
      all = all && sh.certificate.verified && sh.certificate.sup_error <= H.K * 1e-8 * (1 + 1e-9);
      worst = std::max(worst, sh.certificate.sup_error / 1e-8);
    }
    out.certified = all;
    out.value = worst;
    out.label = all ? "certificate" : "certificate failed";
    return out;
  }
  const ModulusEstimate m =
      estimate_shadowing_modulus(f, X, region, s.shadowing.epsilon, s.shadowing.trials, s.shadowing.chain_length, seed);
  out.value = m.delta_estimate;
  out.estimated = m.delta_estimate >= kModulusCollapse;
  out.label = "estimate " + fmt(m.delta_estimate);
  return out;
}

std::vector<System> systems_with_controls(const Scenario& s) {
  std::vector<System> out;
  if (!s.system.builtin.empty()) out.push_back(make_system(s.system));
  for (const auto& c : s.controls)
    if (!c.builtin.empty()) out.push_back(make_system(c));
  return out;
}

// ---------------------------------------------------------------- components

void digraph_components(const Scenario& s, Report& r) {
  const DigraphSpec& spec = *s.system.digraph;
  const Digraph dg = random_digraph(spec.nodes, spec.density, spec.seed);
  const ChainGraph g = engine_graph(dg);
  const ChainDecomposition d = classify_components(g, chain_components(g), 0.0);
  const std::string label = s.system.label();
  Check c{"components", "decomposition", label, {{"nodes", spec.nodes}}, Verdict::pass, "", Json::object()};
  c.detail = std::to_string(d.size()) + " components";
  Json comps = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i)
    comps.push_back({{"cells", cells_json(d.at(i))}, {"terminal", d.info[i].is_terminal}, {"initial", d.info[i].is_initial}});
  c.witness["components"] = comps;
  if (s.expect.components && *s.expect.components != d.size()) c.verdict = Verdict::fail;
  r.add(std::move(c));
  const OracleResult o = compare_engine(dg);
  Check oc{"components", "oracle_agreement", label, {{"queries", o.queries}}, o.ok() ? Verdict::pass : Verdict::fail,
           std::to_string(o.mismatches.size()) + " mismatches", Json::object()};
  oc.witness["mismatches"] = o.mismatches;
  r.add(std::move(oc));
}

void suite_components(const Scenario& s, Report& r) {
  if (s.system.digraph) return digraph_components(s, r);
  const System sys = make_system(s.system);
  for (int n : s.resolutions) {
    const Level L = make_level(sys.f, n);
    for (std::size_t k = 0; k < s.deltas.size(); ++k) {
      const double delta = to_metric(s, *L.X, s.deltas[k]);
      const ChainGraph g = build_chain_graph(L.F, delta);
      const ChainDecomposition raw = chain_components(g);
      for (double e : epsilons_for(s, s.deltas[k])) {
        const double eps = to_metric(s, *L.X, e);
        const ChainDecomposition d = classify_components(g, raw, eps);
        const Json params = level_params(s, n, s.deltas[k], e);
        Check c{"components", "decomposition", sys.label, params, Verdict::pass, "", Json::object()};
        std::ostringstream det;
        det << d.size() << " components";
        Json comps = Json::array();
        for (std::size_t i = 0; i < d.size(); ++i) {
          const CellSet& C = d.at(i);
          comps.push_back({{"cells", cells_json(C)},
                           {"center", point_json(L.X->center(C.first()))},
                           {"terminal", d.info[i].is_terminal},
                           {"initial", d.info[i].is_initial},
                           {"escape_radius", d.info[i].escape_radius},
                           {"reverse_escape_radius", d.info[i].reverse_escape_radius}});
          det << "; " << fmt(L.X->center(C.first())[0]) << (d.info[i].is_terminal ? " T" : "")
              << (d.info[i].is_initial ? " I" : "");
        }
        c.detail = det.str();
        c.witness["components"] = comps;
        if (s.expect.components && *s.expect.components != d.size()) c.verdict = Verdict::fail;
        r.add(std::move(c));
        r.add_series("component_counts", {{"system", sys.label},
                                          {"resolution", n},
                                          {"delta", s.deltas[k]},
                                          {"epsilon", e},
                                          {"components", d.size()},
                                          {"recurrent_cells", d.recurrent.count()}});

        // Components partition CR exactly.
        CellSet uni(g.cell_count());
        bool disjoint = true;
        for (const auto& C : d.components) {
          disjoint = disjoint && !uni.intersects(C);
          uni |= C;
        }
        const bool partition = disjoint && uni == d.recurrent && d.recurrent == chain_recurrent_set(g);
        Check pc{"components", "partition", sys.label, params, partition ? Verdict::pass : Verdict::fail, "", Json::object()};
        if (!partition) pc.witness["union"] = cells_json(uni), pc.witness["recurrent"] = cells_json(d.recurrent);
        r.add(std::move(pc));

        // is_initial(g) == is_terminal(reversed g).
        const ChainGraph rev = g.reversed();
        const ChainDecomposition dr = classify_components(rev, chain_components(rev), eps);
        bool dual = dr.size() == d.size();
        Json bad = Json::array();
        for (std::size_t i = 0; dual && i < d.size(); ++i)
          if (!(dr.at(i) == d.at(i)) || dr.info[i].is_terminal != d.info[i].is_initial ||
              dr.info[i].is_initial != d.info[i].is_terminal)
            bad.push_back(i);
        dual = dual && bad.empty();
        Check dc{"components", "terminal_initial_duality", sys.label, params, dual ? Verdict::pass : Verdict::fail, "",
                 Json::object()};
        if (!dual) dc.witness["components"] = bad;
        r.add(std::move(dc));

        const MinimalitySeparationReport ms = minimality_and_separation_checks(g, d);
        Check mc{"components", "minimality_separation", sys.label, params, ms.passed ? Verdict::pass : Verdict::fail,
                 "", Json::object()};
        int applicable = 0;
        for (const auto& m : ms.minimality) applicable += m.applicable;
        double sep = std::numeric_limits<double>::infinity();
        for (const auto& sc : ms.separation) sep = std::min(sep, sc.min_distance);
        mc.detail = std::to_string(applicable) + " clopen checks, " + std::to_string(ms.separation.size()) +
                    " initial components" + (ms.separation.empty() ? "" : ", min orbit distance " + fmt(sep));
        Json fails = Json::array();
        for (const auto& m : ms.minimality)
          if (!m.passed) fails.push_back({{"component", m.component}, {"kind", "not clopen"}});
        for (const auto& sc : ms.separation)
          if (!sc.passed) fails.push_back({{"component", sc.component}, {"kind", "orbit enters component"}});
        if (!fails.empty()) mc.witness["violations"] = fails;
        r.add(std::move(mc));
      }
    }
  }
}

// ---------------------------------------------------------------- refinement

void suite_refinement(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  const System sys = make_system(s.system);
  if (s.resolutions.size() < 2) {
    r.add({"refinement", "stabilization", sys.label, Json::object(), Verdict::hypotheses_not_met,
           "needs at least two resolutions", Json::object()});
    return;
  }
  std::vector<double> deltas;
  for (std::size_t i = 0; i < s.resolutions.size(); ++i) {
    const auto X = grid_for(sys.f, s.resolutions[i]);
    const double d = s.deltas.size() == s.resolutions.size() ? s.deltas[i] : s.deltas.front();
    deltas.push_back(to_metric(s, *X, d));
  }
  const CellMapFactory factory = [&](int n) {
    return std::make_shared<const CellMap>(build_cell_map(sys.f, grid_for(sys.f, n)));
  };
  Json params;
  params["resolutions"] = s.resolutions;
  params["deltas"] = deltas;
  try {
    const RefinementReport rep = refine(factory, s.resolutions, deltas);
    Json counts = Json::array();
    for (const auto& L : rep.levels) {
      counts.push_back(L.component_count);
      r.add_series("refinement", {{"system", sys.label},
                                  {"resolution", L.resolution},
                                  {"delta", L.delta},
                                  {"components", L.component_count},
                                  {"recurrent_cells", L.recurrent_count},
                                  {"shrinkage_ok", L.shrinkage_ok}});
    }
    Check c{"refinement", "component_count_stable", sys.label, params,
            rep.counts_stable ? Verdict::pass : Verdict::fail, "counts " + counts.dump(), Json::object()};
    c.witness["counts"] = counts;
    r.add(std::move(c));
    Check m{"refinement", "enclosure_shrinkage", sys.label, params,
            rep.shrinkage_monotone ? Verdict::pass : Verdict::fail, "", Json::object()};
    if (!rep.shrinkage_monotone) {
      Json bad = Json::array();
      for (const auto& L : rep.levels)
        if (!L.shrinkage_ok) bad.push_back(L.resolution);
      m.witness["levels"] = bad;
    }
    r.add(std::move(m));
  } catch (const ConfigError& e) {
    r.add({"refinement", "stabilization", sys.label, params, Verdict::hypotheses_not_met, e.what(), Json::object()});
  }

  // Edge and CR monotonicity in delta on the finest grid.
  const Level L = make_level(sys.f, s.resolutions.back());
  std::vector<double> ladder{1, 2, 4};
  for (double d : s.deltas) ladder.push_back(s.delta_unit == DeltaUnit::cells ? d : d / L.X->spacing());
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  bool mono = true;
  Json witness = Json::object();
  std::optional<ChainGraph> prev;
  CellSet prev_cr;
  for (double cells : ladder) {
    ChainGraph g = build_chain_graph(L.F, cells * L.X->spacing());
    const CellSet cr = chain_recurrent_set(g);
    if (prev) {
      bool edges = true;
      for (Cell c = 0; c < g.cell_count() && edges; ++c)
        for (Cell t : prev->successors(c)) {
          auto row = g.successors(c);
          if (!std::binary_search(row.begin(), row.end(), t)) {
            edges = false;
            witness["edge"] = {c, t};
            witness["delta_cells"] = cells;
            break;
          }
        }
      if (!edges || !prev_cr.is_subset_of(cr)) mono = false;
    }
    prev = std::move(g);
    prev_cr = cr;
  }
  Json mp = {{"resolution", L.n}, {"delta_cells", ladder}};
  r.add({"refinement", "delta_monotonicity", sys.label, mp, mono ? Verdict::pass : Verdict::fail, "", witness});
}

// ---------------------------------------------------------------- theorem 1.1

void theorem_1_1_for(const Scenario& s, const System& sys, Report& r) {
  for (int n : s.resolutions) {
    const Level L = make_level(sys.f, n);
    const double delta = to_metric(s, *L.X, s.deltas.front());
    const ChainGraph g = build_chain_graph(L.F, delta);
    const double eps = to_metric(s, *L.X, epsilons_for(s, s.deltas.front()).front());
    const ChainDecomposition d = classify_components(g, chain_components(g), eps);
    const Json params = level_params(s, n, s.deltas.front(), epsilons_for(s, s.deltas.front()).front());
    const CellSet all = CellSet::full(g.cell_count());
    const Support sup = shadowing_support(sys.f, *L.X, all, s, mix_seed(s.seed, 11));

    // L-shadowing on a b-neighborhood.
    Lemma21Options opt;
    opt.seed = mix_seed(s.seed, 12);
    opt.trials = s.shadowing.trials;
    opt.chain_length = s.shadowing.chain_length;
    const Lemma21Report l21 = lemma21_pipeline(sys.f, *L.X, all, s.shadowing.b, s.shadowing.c, opt);

    for (std::size_t i = 0; i < d.size(); ++i) {
      const CellSet& Lam = d.at(i);
      Json p = params;
      p["lambda"] = cells_json(Lam);
      auto add = [&](const std::string& name, Verdict v, std::string detail, Json w = Json::object()) {
        r.add({"theorem_1_1", name, sys.label, p, v, std::move(detail), std::move(w)});
      };
      const Verdict interior_v = met(!interior(*L.X, Lam).empty());
      add("interior_nonempty", interior_v, std::to_string(interior(*L.X, Lam).count()) + " interior cells");

      // Restriction of the graph to Lambda is strongly connected.
      bool transitive = true;
      {
        const Cell c0 = Lam.first();
        CellSet fwd(g.cell_count()), bwd(g.cell_count());
        std::vector<Cell> stack{c0};
        fwd.insert(c0);
        while (!stack.empty()) {
          Cell c = stack.back();
          stack.pop_back();
          for (Cell t : g.successors(c))
            if (Lam.contains(t) && !fwd.contains(t)) fwd.insert(t), stack.push_back(t);
        }
        stack = {c0};
        bwd.insert(c0);
        while (!stack.empty()) {
          Cell c = stack.back();
          stack.pop_back();
          for (Cell t : g.predecessors(c))
            if (Lam.contains(t) && !bwd.contains(t)) bwd.insert(t), stack.push_back(t);
        }
        transitive = fwd == Lam && bwd == Lam;
      }
      const Verdict trans_v = met(transitive);
      add("chain_transitive", trans_v, transitive ? "restriction strongly connected" : "restriction not strongly connected");

      const Verdict shadow_v = met(sup.certified);
      add("shadowing_certified", shadow_v, sup.label + (sup.certified ? "" : "; estimates do not certify"),
          {{"value", sup.value}});
      const Verdict lshadow_v = l21.verdict == Verdict::pass ? Verdict::pass : Verdict::hypotheses_not_met;
      add("l_shadowing", lshadow_v,
          std::string(to_string(l21.verdict)) + ", " + std::to_string(l21.lpo_shadowed) + "/" +
              std::to_string(l21.lpo_tested) + " limit pseudo-orbits",
          {{"counterexamples", l21.counterexamples}});

      const auto prereq = {interior_v, trans_v, shadow_v, lshadow_v};
      const bool both = d.info[i].is_initial && d.info[i].is_terminal;
      add("lemma_4_3_initial_terminal", gate(prereq, both),
          std::string("initial ") + (d.info[i].is_initial ? "yes" : "no") + ", terminal " +
              (d.info[i].is_terminal ? "yes" : "no"));
      const bool cicr = clopen_in_CR(g, d, i);
      add("lemma_2_4_clopen_in_cr", gate(prereq, cicr), cicr ? "clopen in CR" : "meets the closure of CR \\ Lambda");
      const bool clopen = is_clopen(*L.X, Lam);
      add("clopen", gate(prereq, clopen), clopen ? "clopen" : "boundary nonempty",
          clopen ? Json::object() : Json{{"boundary", cells_json(boundary(*L.X, Lam))}});
      const bool whole = Lam.count() == g.cell_count();
      add("lambda_is_space", gate(prereq, whole), std::to_string(Lam.count()) + "/" + std::to_string(g.cell_count()) + " cells",
          whole ? Json::object() : Json{{"missing", cells_json(all - Lam)}});
      const bool mixing = is_chain_mixing(g);
      add("chain_mixing", gate(prereq, mixing), "period " + std::to_string(chain_period(g)));
    }

    // Corollary 4.1: connected grid, CR with interior, finitely many components, shadowing.
    const Verdict c41_pre = met(!interior(*L.X, d.recurrent).empty() && sup.certified);
    r.add({"theorem_1_1", "corollary_4_1_mixing", sys.label, params, gate({c41_pre}, is_chain_mixing(g)),
           std::to_string(d.size()) + " components, shadowing " + sup.label, Json::object()});

    // Direct proof: glue two nearby orbits both ways; the glued point lies in W^u(x) and W^s(y).
    if (sys.f.linear_part) {
      const HyperbolicSplitting H = hyperbolic_splitting(*sys.f.linear_part);
      Rng rng(mix_seed(s.seed, 13));
      const Point x = point2(rng.uniform(), rng.uniform());
      const Point y = sys.f.wrap(x + point2(0.6e-6, -0.8e-6));
      bool ok = true;
      Json w = Json::array();
      for (int dir = 0; dir < 2; ++dir) {
        const Point& a = dir ? y : x;
        const Point& b = dir ? x : y;
        const GluedOrbit G = glue_orbits_linear(H, sys.f, a, b, 30);
        std::vector<double> sched(G.lpo.m + 1);
        for (std::size_t j = 0; j < sched.size(); ++j) sched[j] = 10 * G.lpo.schedule[j] + 1e-15;
        const LimitShadowCheck chk = check_limit_shadowing(sys.f, G.lpo, G.z, H.K * 1e-6, sched);
        const Membership mu = stable_unstable_membership(sys.f, a, G.z.approx, 20, 1e-5);
        const Membership ms = stable_unstable_membership(sys.f, b, G.z.approx, 20, 1e-5);
        const bool good = chk.passed && mu.in_Wu && ms.in_Ws;
        ok = ok && good;
        w.push_back({{"x", point_json(a)}, {"y", point_json(b)}, {"z", point_json(G.z.approx)},
                     {"sup_error", chk.sup_error}, {"in_Wu_x", mu.in_Wu}, {"in_Ws_y", ms.in_Ws}});
      }
      r.add({"theorem_1_1", "unstable_stable_gluing", sys.label, params, ok ? Verdict::pass : Verdict::fail,
             "both gluing directions", {{"gluings", w}}});
    }
  }
}

void suite_theorem_1_1(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  for (const auto& sys : systems_with_controls(s)) theorem_1_1_for(s, sys, r);
}

// ---------------------------------------------------------------- theorem 1.2

std::vector<USpec> uspecs_for(const Scenario& s, const PointMap& f) {
  if (!s.attractors.empty()) return s.attractors;
  USpec u;
  if (f.domain == Domain::circle) {
    u.kind = USpec::Kind::arc;
    u.lo = -0.3;
    u.hi = std::numbers::pi + 0.3;
  }
  return {u};
}

Json uspec_json(const USpec& u) {
  switch (u.kind) {
    case USpec::Kind::all: return "all";
    case USpec::Kind::arc: return {{"arc", {u.lo, u.hi}}};
    case USpec::Kind::ball: return {{"ball", {{"center", point_json(u.center)}, {"radius", u.radius}}}};
    case USpec::Kind::cells: return {{"cells", u.cells}};
  }
  return nullptr;
}

void suite_theorem_1_2(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  for (const auto& sys : systems_with_controls(s)) {
    std::optional<Support> support;
    for (const USpec& u : uspecs_for(s, sys.f)) {
      for (int n : s.resolutions) {
        const Level L = make_level(sys.f, n);
        CellSet U;
        try {
          U = u.realize(*L.X);
        } catch (const ConfigError& e) {
          r.add({"theorem_1_2", "trapping_region", sys.label, {{"resolution", n}, {"region", uspec_json(u)}},
                 Verdict::hypotheses_not_met, e.what(), Json::object()});
          continue;
        }
        Json base = {{"resolution", n}, {"region", uspec_json(u)}};
        if (!is_trapping(*L.F, U)) {
          r.add({"theorem_1_2", "trapping_region", sys.label, base, Verdict::hypotheses_not_met,
                 "region is not trapping; no attractor", Json::object()});
          continue;
        }
        const Attractor A = attractor_from_trapping(*L.F, TrappingRegion{U});
        if (!support) {
          const CellSet region = closed_neighborhood(*L.X, A.lambda, 0.1);
          support = shadowing_support(sys.f, *L.X, region, s, mix_seed(s.seed, 21));
        }
        const Verdict shadow_v = met(support->certified || support->estimated);
        for (double dv : s.deltas) {
          const double delta = to_metric(s, *L.X, dv);
          const ChainGraph g = build_chain_graph(L.F, delta);
          for (double e : s.epsilons.empty() ? std::vector<double>{5 * dv} : s.epsilons) {
            const double eps = to_metric(s, *L.X, e);
            Json p = base;
            p["delta"] = dv;
            p["epsilon"] = e;
            p["shadowing"] = support->label;
            const BoundaryStabilityReport br = verify_boundary_chain_stable(g, A, eps, support->certified);
            Check c{"theorem_1_2", "boundary_chain_stable", sys.label, p, Verdict::pass, "", Json::object()};
            if (br.vacuous) {
              c.verdict = gate({shadow_v}, true);
              c.detail = "clopen attractor; boundary empty";
            } else {
              const bool ok = br.stable && br.escape_radius <= 5 * delta + L.X->tolerance();
              c.verdict = gate({shadow_v}, ok);
              c.detail = "escape radius " + fmt(br.escape_radius / delta) + " delta, " +
                         std::to_string(A.boundary.count()) + " boundary cells";
              c.witness["boundary"] = cells_json(A.boundary);
              c.witness["escape_radius"] = br.escape_radius;
              if (!br.witness.empty()) c.witness["path"] = path_json(br.witness);
            }
            r.add(std::move(c));
          }
          // Every boundary cell is entered from outside the attractor.
          if (!A.boundary.empty()) {
            bool all = true;
            Json bad = Json::array();
            (A.boundary & closure(*L.X, A.lambda)).for_each([&](Cell x) {
              const EscapeWitness w = escape_witness(g, A, x);
              if (!w.found || A.lambda.contains(w.z)) {
                all = false;
                bad.push_back(x);
              }
            });
            Json p = base;
            p["delta"] = dv;
            r.add({"theorem_1_2", "lemma_5_1_escape_witness", sys.label, p, all ? Verdict::pass : Verdict::fail, "",
                   bad.empty() ? Json::object() : Json{{"cells", bad}}});
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------- lemma 5.2

void suite_lemma_5_2(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  const System sys = make_system(s.system);
  for (int n : s.resolutions) {
    const Level L = make_level(sys.f, n);
    const double delta = to_metric(s, *L.X, s.deltas.front());
    const ChainGraph g = build_chain_graph(L.F, delta);
    const ChainDecomposition d = classify_components(g, chain_components(g), delta);
    std::vector<std::pair<std::string, CellSet>> targets;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.info[i].is_terminal) targets.emplace_back("component at " + fmt(L.X->center(d.at(i).first())[0]), d.at(i));
    for (const USpec& u : s.attractors) {
      CellSet U;
      try {
        U = u.realize(*L.X);
      } catch (const ConfigError&) {
        continue;
      }
      if (!is_trapping(*L.F, U)) continue;
      targets.emplace_back("attractor of " + uspec_json(u).dump(), attractor_from_trapping(*L.F, TrappingRegion{U}).lambda);
    }
    for (const auto& [name, S] : targets) {
      for (double av : s.a_values) {
        const double a = to_metric(s, *L.X, av);
        Json p = level_params(s, n, s.deltas.front());
        p["a"] = av;
        p["S"] = cells_json(S);
        Check c{"lemma_5_2", "attractor_between", sys.label, p, Verdict::pass, name, Json::object()};
        try {
          const ChainStableAttractor A = attractor_from_chain_stable(g, S, a);
          const CellSet B = closed_neighborhood(*L.X, S, a);
          const bool ok = S.is_subset_of(A.attractor.lambda) && A.attractor.lambda.is_subset_of(B);
          c.verdict = ok ? Verdict::pass : Verdict::fail;
          c.detail += ": |S| " + std::to_string(S.count()) + ", |lambda| " + std::to_string(A.attractor.lambda.count()) +
                      ", |B_a| " + std::to_string(B.count()) + ", construction delta " +
                      fmt(A.construction_delta / L.X->spacing()) + " cells";
          c.witness["lambda"] = cells_json(A.attractor.lambda);
          c.witness["construction_delta"] = A.construction_delta;
        } catch (const ResolutionInsufficient& e) {
          c.verdict = Verdict::resolution_insufficient;
          c.detail += std::string(": ") + e.what();
        } catch (const ArgumentError& e) {
          c.verdict = Verdict::hypotheses_not_met;
          c.detail += std::string(": ") + e.what();
        }
        r.add(std::move(c));
      }
    }
  }
}

// ---------------------------------------------------------------- corollaries 5

struct ArcEnumeration {
  long arcs = 0, trapping = 0;
  bool touches = false;  // some attractor has C in its closure and meeting its boundary
  Json example;
};

// All arcs of cells on a circle grid, as candidate trapping regions.
ArcEnumeration enumerate_arcs(const CellMap& F, const CellSet& C) {
  const GridSpace& X = F.space();
  const long n = static_cast<long>(X.cell_count());
  ArcEnumeration out;
  // Image of each cell as a cyclic arc (start, length); cells with scattered images keep length n.
  std::vector<long> start(n), len(n);
  for (long c = 0; c < n; ++c) {
    const CellSet img = F.forward_set(static_cast<Cell>(c));
    long best_len = n, best_start = 0;
    // Largest gap gives the minimal covering arc.
    std::vector<Cell> v = img.to_vector();
    long gap = -1;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const long a = v[k], b = v[(k + 1) % v.size()];
      const long gsz = ((b - a - 1) % n + n) % n;
      if (v.size() == 1) {
        gap = n - 1;
        best_start = a;
        break;
      }
      if (gsz > gap) {
        gap = gsz;
        best_start = b;
      }
    }
    best_len = n - gap;
    start[c] = best_start;
    len[c] = best_len;
  }
  auto need = [&](long c, long s) { return ((start[c] - s) % n + n) % n + len[c]; };
  for (long s0 = 0; s0 < n; ++s0) {
    long req = 0;
    for (long m = 1; m < n - 1; ++m) {
      // Arc s0..s0+m-1, closure adds one cell on each side.
      if (m == 1) req = std::max({need((s0 - 1 + n) % n, s0), need(s0, s0), need((s0 + 1) % n, s0)});
      else req = std::max(req, need((s0 + m) % n, s0));
      ++out.arcs;
      if (req > m) continue;
      ++out.trapping;
      CellSet U(n);
      for (long k = 0; k < m; ++k) U.insert(static_cast<Cell>((s0 + k) % n));
      if (!C.is_subset_of(closure(X, U))) continue;
      const Attractor A = attractor_from_trapping(F, TrappingRegion{U});
      if (C.is_subset_of(closure(X, A.lambda)) && C.intersects(A.boundary)) {
        if (!out.touches) out.example = {{"U", cells_json(U)}, {"lambda", cells_json(A.lambda)}};
        out.touches = true;
      }
    }
  }
  return out;
}

void suite_corollaries_5(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  const System sys = make_system(s.system);
  std::optional<Support> support;
  for (int n : s.resolutions) {
    const Level L = make_level(sys.f, n);
    const double delta = to_metric(s, *L.X, s.deltas.front());
    const ChainGraph g = build_chain_graph(L.F, delta);
    const ChainDecomposition d = classify_components(g, chain_components(g), delta);
    if (!support) support = shadowing_support(sys.f, *L.X, CellSet::full(g.cell_count()), s, mix_seed(s.seed, 31));
    const bool shadow_ok = support->certified || support->estimated;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const CellSet& C = d.at(i);
      Json base = level_params(s, n, s.deltas.front());
      base["component"] = cells_json(C);
      base["shadowing"] = support->label;
      const std::string where = "C at " + fmt(L.X->center(C.first())[0]);

      for (double av : s.a_values) {
        const double a = to_metric(s, *L.X, av);
        Json p = base;
        p["a"] = av;
        Check c1{"corollaries_5", "corollary_5_1_thin_terminal", sys.label, p, Verdict::pass, where, Json::object()};
        try {
          const ThinTerminal t = terminal_with_empty_interior_near(g, d, i, a, shadow_ok);
          const bool ok = interior(*L.X, t.D).empty() && t.D.is_subset_of(closed_neighborhood(*L.X, C, a));
          c1.verdict = ok ? Verdict::pass : Verdict::fail;
          c1.detail += ": D " + cells_json(t.D).dump();
          c1.witness["D"] = cells_json(t.D);
          c1.witness["lambda"] = cells_json(t.lambda);
        } catch (const ArgumentError& e) {
          c1.verdict = Verdict::hypotheses_not_met;
          c1.detail += std::string(": ") + e.what();
        } catch (const ResolutionInsufficient& e) {
          c1.verdict = Verdict::resolution_insufficient;
          c1.detail += std::string(": ") + e.what();
        }
        r.add(std::move(c1));

        Check c2{"corollaries_5", "corollary_5_2_neighbors", sys.label, p, Verdict::pass, where, Json::object()};
        try {
          const NeighborPair np = neighbors_of_nonclopen_bidirectional(g, d, i, a);
          c2.witness["D"] = cells_json(d.at(np.terminal));
          c2.witness["E"] = cells_json(d.at(np.initial));
        } catch (const ArgumentError& e) {
          c2.verdict = Verdict::hypotheses_not_met;
          c2.detail += std::string(": ") + e.what();
        } catch (const ResolutionInsufficient& e) {
          c2.verdict = Verdict::resolution_insufficient;
          c2.detail += std::string(": ") + e.what();
        }
        r.add(std::move(c2));
      }

      // Corollary 5.3: C not initial iff C lies in the boundary of some attractor.
      Check c3{"corollaries_5", "corollary_5_3_equivalence", sys.label, base, Verdict::pass, where, Json::object()};
      const bool not_initial = !d.info[i].is_initial;
      try {
        const BoundaryConstruction bc = attractor_with_C_in_boundary(g, d, i);
        bool constructive = false;
        if (!bc.c_is_initial) {
          const Attractor& A = bc.construction->attractor;
          bool witnesses = true;
          C.for_each([&](Cell x) {
            const EscapeWitness w = escape_witness(g, A, x);
            witnesses = witnesses && w.found && !A.lambda.contains(w.z);
          });
          constructive = bc.c_in_lambda && bc.chain_boundary && witnesses;
          c3.witness["lambda"] = cells_json(A.lambda);
          c3.witness["y"] = bc.witness_y;
          c3.witness["in_topological_boundary"] = bc.in_topological_boundary;
        }
        bool agree = constructive == not_initial && bc.c_is_initial == !not_initial;
        c3.detail += std::string(not_initial ? ": not initial" : ": initial") +
                     (constructive ? ", boundary attractor built" : ", no boundary attractor");
        if (L.X->dimension() == 1 && L.X->axes()[0].periodic && n <= 360) {
          const ArcEnumeration en = enumerate_arcs(*L.F, C);
          agree = agree && en.touches == not_initial;
          c3.detail += "; " + std::to_string(en.trapping) + "/" + std::to_string(en.arcs) + " arcs trapping, " +
                       (en.touches ? "some" : "none") + " with C on the boundary";
          if (en.touches) c3.witness["arc_example"] = en.example;
        }
        c3.verdict = agree ? Verdict::pass : Verdict::fail;
      } catch (const ResolutionInsufficient& e) {
        c3.verdict = Verdict::resolution_insufficient;
        c3.detail += std::string(": ") + e.what();
      }
      r.add(std::move(c3));
    }

    // Lemma 5.3: every cell reaches a terminal component.
    bool ok = true;
    Json bad = Json::array();
    const Cell stride = std::max<Cell>(1, static_cast<Cell>(g.cell_count() / 64));
    for (Cell x = 0; x < g.cell_count(); x += stride) {
      const TerminalReach t = reach_terminal(g, d, x);
      if (!d.info[t.component].is_terminal && !d.is_sink[t.component]) {
        ok = false;
        bad.push_back(x);
      }
    }
    r.add({"corollaries_5", "lemma_5_3_reach_terminal", sys.label, level_params(s, n, s.deltas.front()),
           ok ? Verdict::pass : Verdict::fail, "sampled every " + std::to_string(stride) + " cells",
           bad.empty() ? Json::object() : Json{{"cells", bad}}});
  }
}

// ---------------------------------------------------------------- appendix A

void suite_appendix_a(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  const System sys = make_system(s.system);
  for (std::size_t ui = 0; ui < s.attractors.size(); ++ui) {
    const USpec& u = s.attractors[ui];
    Json p = {{"region", uspec_json(u)}, {"resolutions", s.resolutions}, {"iterations", s.iterations}};
    BoundaryStudy st;
    try {
      st = boundary_refinement_study(sys.f, u, s.resolutions, s.iterations);
    } catch (const ConfigError& e) {
      r.add({"appendix_a", "boundary_study", sys.label, p, Verdict::hypotheses_not_met, e.what(), Json::object()});
      continue;
    }
    Json counts = Json::array();
    bool trapping = true;
    for (const auto& L : st.levels) {
      counts.push_back(L.boundary_components);
      trapping = trapping && L.trapping;
      r.add_series("boundary_components",
                   {{"system", sys.label}, {"region", ui}, {"resolution", L.resolution}, {"count", L.boundary_components}});
      const double diam = 2 * grid_for(sys.f, L.resolution)->cell_radius();
      for (std::size_t i = 0; i < L.hausdorff.size(); ++i)
        r.add_series("hausdorff", {{"system", sys.label},
                                   {"region", ui},
                                   {"resolution", L.resolution},
                                   {"iteration", i + 1},
                                   {"distance", L.hausdorff[i]},
                                   {"cell_diameters", L.hausdorff[i] / diam}});
    }
    const Verdict trap_v = met(trapping);
    r.add({"appendix_a", "theorem_a_1_count_stable", sys.label, p, gate({trap_v}, st.count_stable),
           "counts " + counts.dump(), {{"counts", counts}}});
    for (const auto& L : st.levels) {
      Json q = p;
      q.erase("resolutions");
      q["resolution"] = L.resolution;
      const bool ok = L.band_ok && L.band_entry >= 1 && L.band_entry <= 50;
      r.add({"appendix_a", "remark_a_1_hausdorff_band", sys.label, q,
             gate({met(L.trapping), met(L.ring_hypothesis)}, ok),
             "band entered at iteration " + std::to_string(L.band_entry), Json::object()});
    }
  }
}

// ---------------------------------------------------------------- linear shadowing

void suite_shadowing_linear(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  const System sys = make_system(s.system);
  const auto& o = s.shadowing;
  Json p = {{"chains", o.linear_chains}, {"length", o.linear_length}, {"delta", o.linear_delta}};
  if (!sys.f.linear_part) {
    r.add({"shadowing_linear", "solver", sys.label, p, Verdict::hypotheses_not_met, "no exact solver for this system",
           Json::object()});
    return;
  }
  const HyperbolicSplitting H = hyperbolic_splitting(*sys.f.linear_part);
  const double lu = std::abs(H.lambda_u), ls = std::abs(H.lambda_s);
  const double K = 1 / (1 - ls) + 1 / (lu - 1);
  r.add({"shadowing_linear", "splitting", sys.label, Json::object(),
         std::abs(K - H.K) <= 1e-12 && std::abs(lu * ls - 1) <= 1e-12 ? Verdict::pass : Verdict::fail,
         "K " + fmt(H.K), {{"K", H.K}, {"lambda_u", H.lambda_u}, {"lambda_s", H.lambda_s}}});
  const int chains = o.linear_chains;
  std::vector<double> ratio(chains);
  std::vector<char> ok(chains);
  std::vector<std::string> err(chains);
  parallel_for(static_cast<std::size_t>(chains), [&](std::size_t t) {
    Rng rng(mix_seed(s.seed, 1000 + t));
    const Point x0 = point2(rng.uniform(), rng.uniform());
    try {
      const PseudoOrbit po = generate_pseudo_orbit(sys.f, x0, o.linear_length, o.linear_delta,
                                                   t % 2 ? Noise::adversarial : Noise::uniform, mix_seed(s.seed, 5000 + t));
      const LinearShadow sh = shadow_linear_hyperbolic(H, po);
      ratio[t] = sh.certificate.sup_error / o.linear_delta;
      ok[t] = sh.certificate.verified && sh.certificate.sup_error <= H.K * o.linear_delta * (1 + 1e-9);
    } catch (const std::exception& e) {
      ok[t] = 0;
      err[t] = e.what();
    }
  }, 1);
  int failures = 0;
  double worst = 0;
  Json bad = Json::array();
  for (int t = 0; t < chains; ++t) {
    worst = std::max(worst, ratio[t]);
    if (!ok[t]) {
      ++failures;
      if (bad.size() < 10) bad.push_back({{"chain", t}, {"seed", mix_seed(s.seed, 5000 + t)}, {"ratio", ratio[t]}, {"error", err[t]}});
    }
  }
  r.add({"shadowing_linear", "solver_bound", sys.label, p, failures ? Verdict::fail : Verdict::pass,
         std::to_string(failures) + " failures, worst sup/delta " + fmt(worst) + " (K " + fmt(H.K) + ")",
         bad.empty() ? Json::object() : Json{{"failures", bad}}});
  // Histogram of sup/delta in tenths of K.
  std::vector<int> hist(11, 0);
  for (double v : ratio) hist[std::min<std::size_t>(10, static_cast<std::size_t>(v / H.K * 10))]++;
  for (int b = 0; b < 11; ++b)
    r.add_series("shadowing_errors", {{"system", sys.label}, {"bin_lo", b * 0.1 * H.K}, {"bin_hi", (b + 1) * 0.1 * H.K}, {"count", hist[b]}});

  // Minimax agreement on short chains.
  const int short_chains = 20;
  int agree = 0;
  double worst_rel = 0;
  for (int t = 0; t < short_chains; ++t) {
    Rng rng(mix_seed(s.seed, 9000 + t));
    const Point x0 = point2(rng.uniform(), rng.uniform());
    const PseudoOrbit po = generate_pseudo_orbit(sys.f, x0, 4 + t % 9, 1e-3, t % 2 ? Noise::adversarial : Noise::uniform,
                                                 mix_seed(s.seed, 9500 + t));
    const LinearShadow sh = shadow_linear_hyperbolic(H, po);
    const double mm = minimax_shadow_error(sys.f, po);
    const double rel = mm > 0 ? std::abs(sh.certificate.sup_error - mm) / mm : 0;
    worst_rel = std::max(worst_rel, rel);
    agree += rel <= 0.1;
  }
  r.add({"shadowing_linear", "minimax_agreement", sys.label, {{"chains", short_chains}, {"delta", 1e-3}},
         agree == short_chains ? Verdict::pass : Verdict::fail,
         std::to_string(agree) + "/" + std::to_string(short_chains) + " within 10%, worst " + fmt(worst_rel),
         Json::object()});
}

// ---------------------------------------------------------------- lemma 2.1

void suite_lemma_2_1(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  for (const auto& sys : systems_with_controls(s)) {
    const int n = s.resolutions.empty() ? 64 : s.resolutions.front();
    const auto X = grid_for(sys.f, n);
    CellSet region;
    try {
      region = s.shadowing.region.realize(*X);
    } catch (const ConfigError& e) {
      region = CellSet::full(X->cell_count());
    }
    Lemma21Options opt;
    opt.seed = mix_seed(s.seed, 41);
    opt.trials = s.shadowing.trials;
    opt.chain_length = s.shadowing.chain_length;
    const Lemma21Report rep = lemma21_pipeline(sys.f, *X, region, s.shadowing.b, s.shadowing.c, opt);
    Json p = {{"resolution", n}, {"b", s.shadowing.b}, {"c", s.shadowing.c}, {"region", uspec_json(s.shadowing.region)}};
    std::ostringstream det;
    det << "expansivity " << (rep.expansivity.vacuous ? "vacuous" : fmt(rep.expansivity.e_estimate))
        << (rep.expansivity_met ? "" : " (not met)") << ", shadowing delta " << fmt(rep.shadowing_delta)
        << (rep.shadowing_certified ? " certified" : " estimated") << ", " << rep.lpo_shadowed << "/"
        << rep.lpo_tested << " limit pseudo-orbits";
    Json w = {{"counterexamples", rep.counterexamples}};
    if (!rep.expansivity.vacuous)
      w["expansivity_pair"] = {point_json(rep.expansivity.witness_x), point_json(rep.expansivity.witness_y)};
    r.add({"lemma_2_1", "l_shadowing", sys.label, p, rep.verdict, det.str(), w});
  }
}

// ---------------------------------------------------------------- negative controls

void suite_negative_controls(const Scenario& s, Report& r) {
  if (s.system.digraph) return;
  const int n = s.resolutions.empty() ? 720 : s.resolutions.back();
  std::vector<double> eps{0.01, 0.001};
  for (const auto& spec : s.controls) {
    if (spec.builtin.empty()) continue;
    const System sys = make_system(spec);
    const auto X = grid_for(sys.f, n);
    const CellSet all = CellSet::full(X->cell_count());
    for (double e : eps) {
      const long len = 10L * n;
      const ModulusEstimate m = estimate_shadowing_modulus(sys.f, *X, all, e, s.shadowing.trials, len, mix_seed(s.seed, 51));
      for (const auto& rung : m.rungs)
        r.add_series("modulus", {{"system", sys.label}, {"epsilon", e}, {"delta", rung.delta}, {"passed", rung.passed},
                                 {"failures", rung.failures}});
      r.add({"negative_controls", "modulus_collapse", sys.label, {{"epsilon", e}, {"chain_length", len}},
             m.delta_estimate < kModulusCollapse ? Verdict::pass : Verdict::fail,
             "delta estimate " + fmt(m.delta_estimate), {{"delta_estimate", m.delta_estimate}}});
    }
    const ExpansivityEstimate ex = estimate_expansivity(sys.f, *X, all, 30, 32);
    r.add({"negative_controls", "expansivity_vanishes", sys.label, {{"resolution", n}},
           ex.e_estimate < 1e-3 ? Verdict::pass : Verdict::fail, "estimate " + fmt(ex.e_estimate),
           {{"pair", {point_json(ex.witness_x), point_json(ex.witness_y)}}}});
  }
  if (!s.system.builtin.empty()) {
    const System sys = make_system(s.system);
    if (sys.f.linear_part) {
      const auto X = grid_for(sys.f, s.resolutions.empty() ? 101 : s.resolutions.front());
      const ExpansivityEstimate ex = estimate_expansivity(sys.f, *X, CellSet::full(X->cell_count()), 30, 32);
      r.add({"negative_controls", "expansivity_baseline", sys.label, {{"baseline", kExpansivityBaseline}},
             ex.e_estimate >= kExpansivityBaseline ? Verdict::pass : Verdict::fail,
             "estimate " + fmt(ex.e_estimate) + ", min sup " + fmt(ex.min_sup),
             {{"pair", {point_json(ex.witness_x), point_json(ex.witness_y)}}}});
    }
  }
}

// ---------------------------------------------------------------- oracle

void suite_oracle(const Scenario& s, Report& r) {
  const auto& o = s.oracle;
  for (double p : o.densities) {
    OracleResult engine, cor53, perm;
    Lemma44Result closed_total, open_total;
    long graphs = 0;
    for (int n : o.nodes)
      for (int k = 0; k < o.seeds; ++k) {
        const std::uint64_t seed = mix_seed(s.seed, (static_cast<std::uint64_t>(n) << 40) ^ (static_cast<std::uint64_t>(p * 1e6) << 16) ^ k);
        const Digraph dg = random_digraph(n, p, seed);
        ++graphs;
        auto tag = [&](OracleResult res) {
          for (auto& m : res.mismatches) m = "n=" + std::to_string(n) + " seed=" + std::to_string(seed) + ": " + m;
          return res;
        };
        engine.merge(tag(compare_engine(dg)));
        cor53.merge(tag(corollary_5_3(dg)));
        perm.merge(tag(permutation_components(random_permutation(n, seed))));
        const Lemma44Result a = lemma_4_4(random_topological_digraph(n, p, seed, true));
        const Lemma44Result b = lemma_4_4(random_topological_digraph(n, p, seed, false));
        closed_total.applicable += a.applicable;
        closed_total.clopen += a.clopen;
        for (Mask m : a.counterexamples) closed_total.counterexamples.push_back(m);
        open_total.applicable += b.applicable;
        open_total.clopen += b.clopen;
        for (Mask m : b.counterexamples) open_total.counterexamples.push_back(m);
      }
    Json params = {{"nodes", o.nodes}, {"density", p}, {"seeds", o.seeds}, {"graphs", graphs}};
    auto add = [&](const std::string& name, const OracleResult& res) {
      Json w = Json::object();
      if (!res.ok()) w["mismatches"] = std::vector<std::string>(res.mismatches.begin(), res.mismatches.begin() + std::min<std::size_t>(10, res.mismatches.size()));
      r.add({"oracle", name, "random_digraph", params, res.ok() ? Verdict::pass : Verdict::fail,
             std::to_string(res.queries) + " queries, " + std::to_string(res.mismatches.size()) + " mismatches", w});
    };
    add("engine_agreement", engine);
    add("corollary_5_3_equivalence", cor53);
    add("lemmas_4_2_4_3_permutations", perm);
    const bool l44 = closed_total.counterexamples.empty();
    r.add({"oracle", "lemma_4_4_clopen", "random_topological_digraph", params,
           l44 ? (closed_total.applicable ? Verdict::pass : Verdict::hypotheses_not_met) : Verdict::fail,
           std::to_string(closed_total.clopen) + "/" + std::to_string(closed_total.applicable) + " clopen",
           Json::object()});
    // Without target closure the conclusion should fail somewhere.
    r.add({"oracle", "lemma_4_4_control_without_closure", "random_topological_digraph", params,
           open_total.counterexamples.empty() ? Verdict::hypotheses_not_met : Verdict::pass,
           std::to_string(open_total.counterexamples.size()) + " non-clopen components of " +
               std::to_string(open_total.applicable),
           Json::object()});
    r.add_series("oracle", {{"density", p}, {"graphs", graphs}, {"engine_queries", engine.queries},
                            {"corollary_5_3_components", cor53.queries}});
  }
}

using SuiteFn = void (*)(const Scenario&, Report&);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> m{{"components", suite_components},
                                                {"refinement", suite_refinement},
                                                {"theorem_1_1", suite_theorem_1_1},
                                                {"theorem_1_2", suite_theorem_1_2},
                                                {"lemma_5_2", suite_lemma_5_2},
                                                {"corollaries_5", suite_corollaries_5},
                                                {"appendix_a", suite_appendix_a},
                                                {"shadowing_linear", suite_shadowing_linear},
                                                {"lemma_2_1", suite_lemma_2_1},
                                                {"negative_controls", suite_negative_controls},
                                                {"oracle", suite_oracle}};
  return m;
}

}  // namespace

double minimax_shadow_error(const PointMap& f, const PseudoOrbit& po, int grid, int zooms) {
  if (!f.linear_part) throw ArgumentError("minimax search needs a toral automorphism");
  const HyperbolicSplitting H = hyperbolic_splitting(*f.linear_part);
  const double delta = std::max(po.delta, 1e-300);
  const long k = po.length();
  auto value = [&](const Point& x) {
    Point y = f.wrap(x);
    double m = f.distance(y, po.points[0]);
    for (std::size_t i = 1; i < po.points.size(); ++i) {
      y = f.forward(y);
      m = std::max(m, f.distance(y, po.points[i]));
    }
    return m;
  };
  // Unstable coordinate measured at the end of the chain, stable one at the start,
  // so both act on the objective at unit scale.
  // Lifted offset f^k(x_0) - x_k, accumulated from the small step errors.
  const Eigen::Matrix2d A = f.linear_part->cast<double>();
  Eigen::Vector2d r = Eigen::Vector2d::Zero();
  for (long i = 0; i < k; ++i) {
    Eigen::Vector2d e = f.forward(po.points[i]) - po.points[i + 1];
    for (int j = 0; j < 2; ++j) e[j] -= std::round(e[j]);
    r = A * r + e;
  }
  const double grow = std::pow(H.lambda_u, static_cast<double>(k));
  const double ru = (H.to_eigen * r)[0];
  auto at = [&](double wu, double ws) -> Point {
    const Eigen::Vector2d v = H.e_u * ((wu - ru) / grow) + H.e_s * ws;
    return po.points[0] + Point(v);
  };
  double cu = 0, cs = 0, h = (H.K + 1) * delta, best = value(at(0, 0));
  for (int z = 0; z < zooms; ++z) {
    double bu = cu, bs = cs;
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double wu = cu + h * (2.0 * i / (grid - 1) - 1), ws = cs + h * (2.0 * j / (grid - 1) - 1);
        const double v = value(at(wu, ws));
        if (v < best) best = v, bu = wu, bs = ws;
      }
    cu = bu;
    cs = bs;
    h *= 4.0 / (grid - 1);
  }
  return best;
}

void run_suite(const std::string& name, const Scenario& s, Report& r) {
  const auto& m = registry();
  const auto it = m.find(name);
  if (it == m.end()) throw ConfigError("unknown suite '" + name + "'");
  it->second(s, r);
}

Report run_scenario(const Scenario& s) {
  Report out;
  out.scenario = s.name;
  out.config_hash = s.config_hash;
  out.seed = s.seed;
  std::vector<std::string> order;
  for (const auto& n : suite_names())
    if (std::find(s.suites.begin(), s.suites.end(), n) != s.suites.end()) order.push_back(n);
  struct Piece {
    Report r;
    double ms = 0;
  };
  std::vector<std::future<Piece>> futures;
  for (const auto& name : order)
    futures.push_back(std::async(std::launch::async, [&s, name] {
      Piece p;
      const auto t0 = Clock::now();
      run_suite(name, s, p.r);
      p.ms = ms_since(t0);
      return p;
    }));
  for (std::size_t i = 0; i < order.size(); ++i) {
    Piece p = futures[i].get();
    for (auto& c : p.r.checks) out.add(std::move(c));
    for (auto& [k, rows] : p.r.series.items())
      for (auto& row : rows) out.add_series(k, row);
    out.timing[order[i] + "_ms"] = p.ms;
  }
  return out;
}

}  // namespace dchain::harness
