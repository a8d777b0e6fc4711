#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dchain/attractors.hpp"
#include "dchain/chains.hpp"
#include "dchain/errors.hpp"
#include "dchain/harness/oracle.hpp"
#include "dchain/rng.hpp"

using namespace dchain;
using harness::Digraph;
using std::numbers::pi;

namespace {

struct Built {
  std::shared_ptr<const CellMap> F;
  ChainGraph g;
};

Built build(const std::string& name, std::vector<double> params, int n, double delta_cells) {
  const auto f = builtin(name, params);
  auto F = std::make_shared<const CellMap>(build_cell_map(f, grid_for(f, n)));
  return {F, build_chain_graph(F, delta_cells * F->space().spacing())};
}

double angle_of(const GridSpace& sp, const CellSet& C) {
  // Circular mean of the centers.
  double s = 0, c = 0;
  C.for_each([&](Cell x) {
    s += std::sin(sp.center(x)(0));
    c += std::cos(sp.center(x)(0));
  });
  double a = std::atan2(s, c);
  return a < 0 ? a + 2 * pi : a;
}

double circ(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2 * pi);
  return std::min(d, 2 * pi - d);
}

}  // namespace

TEST_CASE("identity and huge delta") {
  auto [F, g] = build("identity", {}, 360, 1);
  CHECK(is_chain_transitive(g));
  for (Cell c = 0; c < 360; ++c) {
    const auto s = g.successor_set(c);
    CHECK(s.contains(c));
    CHECK(s.count() <= 5);
  }
  const auto big = build_chain_graph(F, 10.0);
  CHECK(big.edge_count() == 360u * 360u);
  CHECK(chain_recurrent_set(big) == CellSet::full(360));
  CHECK(is_chain_mixing(big));
  CHECK_THROWS(build_chain_graph(F, 0.0));
}

TEST_CASE("north-south circle") {
  auto [F, g] = build("ns_circle", {0.5}, 720, 1);
  const auto& sp = g.space();
  const Cell at_pi_plus = sp.cell_of(point1(pi + 0.1));
  CHECK(chain_reaches(g, at_pi_plus, 0));
  CHECK_FALSE(chain_reaches(g, 0, 360));

  const auto cr = chain_recurrent_set(g);
  CHECK(cr.count() < 40);
  const auto d = classify_components(g, chain_components(g), 5 * sp.spacing());
  REQUIRE(d.size() == 2);
  const std::size_t zero = circ(angle_of(sp, d.at(0)), 0) < 0.1 ? 0 : 1;
  const std::size_t top = 1 - zero;
  CHECK(circ(angle_of(sp, d.at(top)), pi) < 0.1);
  CHECK(d.info[zero].is_terminal);
  CHECK_FALSE(d.info[zero].is_initial);
  CHECK(d.info[top].is_initial);
  CHECK_FALSE(d.info[top].is_terminal);

  CHECK(is_chain_stable(g, d.at(zero), 5 * sp.spacing()).stable);
  const auto up = is_chain_stable(g, d.at(top), 5 * sp.spacing());
  CHECK_FALSE(up.stable);
  REQUIRE(up.witness.size() >= 2);
  CHECK(d.at(top).contains(up.witness.front()));
  CHECK(distance_to_set(sp, up.witness.back(), d.at(top)) > 5 * sp.spacing());
  CHECK_THROWS_AS(is_chain_stable(g, CellSet(720), 0.1), ArgumentError);
  CHECK(is_chain_stable(g, CellSet::full(720), 0).stable);

  const auto sep = component_separation(sp, d);
  REQUIRE(sep.rows() == 2);
  CHECK(sep(0, 1) > 2.9);
  CHECK(sep(0, 1) < pi);
  CHECK(clopen_in_CR(g, d, 0));
  CHECK(clopen_in_CR(g, d, 1));
}

TEST_CASE("four fixed points") {
  auto [F, g] = build("ms4_circle", {0.3}, 720, 1);
  const auto& sp = g.space();
  const auto d = classify_components(g, chain_components(g), 5 * sp.spacing());
  REQUIRE(d.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double a = angle_of(sp, d.at(i));
    const bool sink = circ(a, 0) < 0.1 || circ(a, pi) < 0.1;
    const bool source = circ(a, pi / 2) < 0.1 || circ(a, 3 * pi / 2) < 0.1;
    CHECK((sink || source));
    CHECK(d.info[i].is_terminal == sink);
    CHECK(d.info[i].is_initial == source);
  }
  const auto sep = component_separation(sp, d);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(sep(i, j) > pi / 2 - 0.3);
}

TEST_CASE("cat map grid is one mixing component") {
  auto [F, g] = build("cat_torus", {}, 101, 1);
  CHECK(chain_recurrent_set(g) == CellSet::full(101 * 101));
  const auto d = classify_components(g, chain_components(g), 0);
  REQUIRE(d.size() == 1);
  CHECK(d.info[0].is_terminal);
  CHECK(d.info[0].is_initial);
  CHECK(is_chain_transitive(g));
  CHECK(is_chain_mixing(g));
  CHECK(chain_period(g) == 1);
  CHECK(clopen_in_CR(g, d, 0));
  CHECK(component_separation(g.space(), d).size() == 0);
  const auto ms = minimality_and_separation_checks(g, d);
  CHECK(ms.passed);
}

TEST_CASE("abstract digraphs") {
  Digraph two{2, {0b10, 0b01}, {}};
  const auto g = harness::engine_graph(two);
  CHECK(is_chain_transitive(g));
  CHECK_FALSE(is_chain_mixing(g));
  CHECK(chain_period(g) == 2);

  // Two self-looped nodes declared adjacent: neither is clopen in CR.
  Digraph adj{2, {0b01, 0b10}, {0b10, 0b01}};
  const auto h = harness::engine_graph(adj);
  const auto d = chain_components(h);
  REQUIRE(d.size() == 2);
  CHECK_FALSE(clopen_in_CR(h, d, 0));

  Digraph complete{3, {0b111, 0b111, 0b111}, {}};
  CHECK(is_chain_mixing(harness::engine_graph(complete)));
}

TEST_CASE("decomposition invariants on random digraphs") {
  Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + static_cast<int>(rng.below(11));
    const auto dg = harness::random_digraph(n, 0.1 + 0.3 * rng.uniform(), rng.next());
    const auto g = harness::engine_graph(dg);
    const auto d = classify_components(g, chain_components(g), 0);
    CellSet u(n);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK_FALSE(u.intersects(d.at(i)));
      u |= d.at(i);
      const auto cells = d.at(i).to_vector();
      for (Cell a : cells) {
        CHECK(g.successor_set(a).intersects(d.at(i)));
        for (Cell b : cells) CHECK(chain_reaches(g, a, b));
      }
    }
    CHECK(u == d.recurrent);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j)
        if (i != j) {
          const Cell a = d.at(i).first(), b = d.at(j).first();
          CHECK_FALSE((chain_reaches(g, a, b) && chain_reaches(g, b, a)));
        }
    // Initial under g is terminal under the reversed graph.
    const auto r = g.reversed();
    const auto dr = classify_components(r, chain_components(r), 0);
    REQUIRE(dr.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      std::size_t j = 0;
      while (j < dr.size() && !(dr.at(j) == d.at(i))) ++j;
      REQUIRE(j < dr.size());
      CHECK(d.info[i].is_initial == dr.info[j].is_terminal);
      CHECK(d.info[i].is_terminal == dr.info[j].is_initial);
    }
  }
}

TEST_CASE("edges and recurrence are monotone in delta") {
  for (const std::string name : {"ns_circle", "ms4_circle", "rotation_circle"}) {
    const auto f = builtin(name);
    auto F = std::make_shared<const CellMap>(build_cell_map(f, grid_for(f, 360)));
    const double h = F->space().spacing();
    std::optional<ChainGraph> prev;
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
      auto g = build_chain_graph(F, k * h);
      if (prev) {
        for (Cell c = 0; c < 360; ++c) CHECK(prev->successor_set(c).is_subset_of(g.successor_set(c)));
        CHECK(chain_recurrent_set(*prev).is_subset_of(chain_recurrent_set(g)));
      }
      prev = g;
    }
  }
}

TEST_CASE("refinement sweeps") {
  auto factory = [](const std::string& name) {
    return [name](int n) {
      const auto f = builtin(name);
      return std::make_shared<const CellMap>(build_cell_map(f, grid_for(f, n)));
    };
  };
  const std::vector<int> ns_res{180, 360, 720};
  const auto ns = refine(factory("ns_circle"), ns_res, {2 * pi / 180, 2 * pi / 360, 2 * pi / 720});
  for (const auto& L : ns.levels) CHECK(L.component_count == 2);
  CHECK(ns.counts_stable);
  CHECK(ns.shrinkage_monotone);

  const auto cat = refine(factory("cat_torus"), {51, 101, 201}, {1.0 / 51, 1.0 / 101, 1.0 / 201});
  for (const auto& L : cat.levels) CHECK(L.component_count == 1);

  const auto id = refine(factory("identity"), ns_res, {2 * pi / 180, 2 * pi / 360, 2 * pi / 720});
  for (const auto& L : id.levels) CHECK(L.recurrent_count == static_cast<std::size_t>(L.resolution));

  CHECK_THROWS_AS(refine(factory("ns_circle"), {180, 360}, {0.1, 0.2}), ConfigError);
  CHECK_THROWS_AS(refine(factory("ns_circle"), {180}, {0.1}), ConfigError);
}

TEST_CASE("initial components repel sampled orbits") {
  auto [F, g] = build("ns_circle", {0.5}, 720, 1);
  const auto d = classify_components(g, chain_components(g), 5 * g.space().spacing());
  const auto rep = minimality_and_separation_checks(g, d);
  CHECK(rep.passed);
  bool saw_initial = false;
  for (const auto& s : rep.separation) {
    if (d.info[s.component].is_initial) {
      saw_initial = true;
      CHECK(s.min_distance > 0);
    }
  }
  CHECK(saw_initial);
}

TEST_CASE("iterative SCC on a large grid") {
  auto [F, g] = build("ns_circle", {0.5}, 400000, 1);
  int count = 0;
  const auto comp = strongly_connected(g, &count);
  CHECK(comp.size() == 400000u);
  CHECK(chain_components(g).size() == 2);
}
