#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dchain/attractors.hpp"
#include "dchain/errors.hpp"
#include "dchain/harness/oracle.hpp"

using namespace dchain;
using std::numbers::pi;

namespace {

struct Sys {
  PointMap f;
  std::shared_ptr<const GridSpace> X;
  std::shared_ptr<const CellMap> F;
  ChainGraph g;
  ChainDecomposition d;
};

Sys make(const std::string& name, int n, double delta_cells = 1, double eps_cells = 5) {
  auto f = builtin(name);
  auto X = grid_for(f, n);
  auto F = std::make_shared<const CellMap>(build_cell_map(f, X));
  auto g = build_chain_graph(F, delta_cells * X->spacing());
  auto d = classify_components(g, chain_components(g), eps_cells * X->spacing());
  return {f, X, F, g, d};
}

USpec arc(double lo, double hi) {
  USpec u;
  u.kind = USpec::Kind::arc;
  u.lo = lo;
  u.hi = hi;
  return u;
}

std::size_t component_near(const Sys& s, double angle) {
  const Cell c = s.X->cell_of(point1(angle));
  for (std::size_t i = 0; i < s.d.size(); ++i)
    if (s.d.at(i).contains(c)) return i;
  FAIL("no component at angle");
  return 0;
}

}  // namespace

TEST_CASE("trapping regions") {
  const auto ns = make("ns_circle", 360);
  CHECK(is_trapping(*ns.F, CellSet::full(360)));
  CHECK(is_trapping(*ns.F, arc(-0.5, 0.5).realize(*ns.X)));
  CHECK_FALSE(is_trapping(*ns.F, arc(pi - 0.5, pi + 0.5).realize(*ns.X)));
  CHECK_THROWS_AS(make_trapping_region(*ns.F, arc(pi - 0.5, pi + 0.5).realize(*ns.X)), ArgumentError);

  const auto id = make("identity", 360);
  CHECK_FALSE(is_trapping(*id.F, arc(0, 1).realize(*id.X)));
}

TEST_CASE("attractors of trapping regions") {
  const auto sq = make("square_interval", 200);
  CellSet U(200);
  for (Cell c = 0; c < 100; ++c) U.insert(c);
  const auto A = attractor_from_trapping(*sq.F, make_trapping_region(*sq.F, U));
  CHECK(A.lambda.contains(0));
  CHECK(A.lambda.count() <= 3);
  CHECK(A.boundary == boundary(*sq.X, A.lambda));
  CHECK(connected_components(*sq.X, A.boundary).size() == 1);

  const auto ms = make("ms4_circle", 720);
  const auto U4 = arc(-0.3, pi + 0.3).realize(*ms.X);
  const auto B = attractor_from_trapping(*ms.F, make_trapping_region(*ms.F, U4));
  CHECK(B.lambda.is_subset_of(U4));
  CHECK(arc(0.02, pi - 0.02).realize(*ms.X).is_subset_of(B.lambda));
  CHECK(B.lambda.is_subset_of(arc(-0.05, pi + 0.05).realize(*ms.X)));
  CHECK(connected_components(*ms.X, B.boundary).size() == 2);
  CHECK(ms.F->image(B.lambda).is_subset_of(closed_neighborhood(*ms.X, B.lambda, 2 * ms.X->cell_radius())));

  const auto cat = make("cat_torus", 31);
  const auto C = attractor_from_trapping(*cat.F, make_trapping_region(*cat.F, CellSet::full(961)));
  CHECK(C.lambda == CellSet::full(961));
  CHECK(C.boundary.empty());
  CHECK(verify_boundary_chain_stable(cat.g, C, 0.1, true).vacuous);
}

TEST_CASE("attractor idempotence and monotonicity") {
  const auto ms = make("ms4_circle", 720);
  const auto A = attractor_from_trapping(*ms.F, TrappingRegion{arc(-0.3, pi + 0.3).realize(*ms.X)});
  const CellSet U2 = interior(*ms.X, dilate_cells(*ms.X, A.lambda, {4, 0}));
  REQUIRE(is_trapping(*ms.F, U2));
  CHECK(attractor_from_trapping(*ms.F, TrappingRegion{U2}).lambda == A.lambda);

  const auto ns = make("ns_circle", 720);
  const auto small = attractor_from_trapping(*ns.F, TrappingRegion{arc(-0.3, 0.3).realize(*ns.X)});
  const auto large = attractor_from_trapping(*ns.F, TrappingRegion{arc(-1.0, 1.0).realize(*ns.X)});
  CHECK(small.lambda.is_subset_of(large.lambda));
}

TEST_CASE("attractor from a chain stable set") {
  const auto ns = make("ns_circle", 720);
  const std::size_t z = component_near(ns, 0);
  const double a = 10 * ns.X->spacing();
  const auto r = attractor_from_chain_stable(ns.g, ns.d.at(z), a);
  CHECK(ns.d.at(z).is_subset_of(r.attractor.lambda));
  CHECK(r.attractor.lambda.is_subset_of(closed_neighborhood(*ns.X, ns.d.at(z), a)));

  const auto all = attractor_from_chain_stable(ns.g, CellSet::full(720), a);
  CHECK(all.attractor.lambda == CellSet::full(720));

  const auto ms = make("ms4_circle", 720);
  const auto S = attractor_from_trapping(*ms.F, TrappingRegion{arc(-0.3, pi + 0.3).realize(*ms.X)}).lambda;
  const double a4 = 10 * ms.X->spacing();
  const auto q = attractor_from_chain_stable(ms.g, S, a4);
  CHECK(S.is_subset_of(q.attractor.lambda));
  CHECK(q.attractor.lambda.is_subset_of(closed_neighborhood(*ms.X, S, a4)));

  // The repeller is not chain stable, so the construction refuses it.
  const std::size_t top = component_near(ns, pi);
  CHECK_THROWS_AS(attractor_from_chain_stable(ns.g, ns.d.at(top), a), ArgumentError);
}

TEST_CASE("forward sets") {
  const auto ns = make("ns_circle", 720);
  const auto from_top = chain_forward_set(ns.g, ns.d.at(component_near(ns, pi)));
  CHECK(from_top.count() > 700);
  const auto& sink = ns.d.at(component_near(ns, 0));
  const auto from_sink = chain_forward_set(ns.g, sink);
  CHECK(sink.is_subset_of(from_sink));
  CHECK(from_sink.is_subset_of(closed_neighborhood(*ns.X, sink, 5 * ns.X->spacing())));

  harness::Digraph loops{3, {0b001, 0b010, 0b100}, {}};
  const auto g = harness::engine_graph(loops);
  CHECK(chain_forward_set(g, CellSet(3, {1})) == CellSet(3, {1}));
}

TEST_CASE("components in attractor boundaries") {
  const auto ms = make("ms4_circle", 720);
  const auto r = attractor_with_C_in_boundary(ms.g, ms.d, component_near(ms, 0));
  CHECK_FALSE(r.c_is_initial);
  REQUIRE(r.construction.has_value());
  CHECK(r.c_in_lambda);
  CHECK(r.chain_boundary);
  CHECK(r.in_topological_boundary > 0);
  // The forward set of the sink at 0 stays near 0, not half the circle.
  CHECK(r.construction->attractor.lambda.contains(0));

  const auto ns = make("ns_circle", 720);
  CHECK(attractor_with_C_in_boundary(ns.g, ns.d, component_near(ns, pi)).c_is_initial);
}

TEST_CASE("attractor boundaries are chain stable with escape witnesses") {
  const auto ms = make("ms4_circle", 720);
  const auto A = attractor_from_trapping(ms.g, TrappingRegion{arc(-0.3, pi + 0.3).realize(*ms.X)});
  const double delta = ms.g.delta();
  const auto rep = verify_boundary_chain_stable(ms.g, A, 5 * delta, true);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.stable);
  CHECK(rep.escape_radius <= 5 * delta);

  A.boundary.for_each([&](Cell x) {
    const auto w = escape_witness(ms.g, A, x);
    CHECK(w.found);
    CHECK_FALSE(A.lambda.contains(w.z));
    REQUIRE(!w.path.empty());
    CHECK(w.path.front() == w.z);
    CHECK(w.path.back() == x);
  });

  const auto sq = make("square_interval", 200);
  CellSet U(200);
  for (Cell c = 0; c < 100; ++c) U.insert(c);
  const auto B = attractor_from_trapping(sq.g, TrappingRegion{U});
  B.boundary.for_each([&](Cell x) {
    const auto w = escape_witness(sq.g, B, x);
    CHECK(w.found);
    CHECK_FALSE(B.lambda.contains(w.z));
  });
}

TEST_CASE("reaching terminal components") {
  const auto ns = make("ns_circle", 720);
  const auto z = component_near(ns, 0);
  const auto t = reach_terminal(ns.g, ns.d, ns.X->cell_of(point1(2.0)));
  CHECK(t.component == z);
  CHECK(ns.d.at(z).contains(t.y));
  CHECK(t.path.front() == ns.X->cell_of(point1(2.0)));
  CHECK(t.path.back() == t.y);
  for (std::size_t i = 0; i + 1 < t.path.size(); ++i) CHECK(ns.g.successor_set(t.path[i]).contains(t.path[i + 1]));

  const auto self = reach_terminal(ns.g, ns.d, 0);
  CHECK(self.component == z);
}

TEST_CASE("thin terminal components near a sink") {
  const auto ms = make("ms4_circle", 720);
  const auto c = component_near(ms, 0);
  const auto r = terminal_with_empty_interior_near(ms.g, ms.d, c, 0.5, true);
  CHECK_FALSE(r.D.empty());
  CHECK(interior(*ms.X, r.D).empty());
  CHECK(r.D.is_subset_of(closed_neighborhood(*ms.X, ms.d.at(c), 0.5)));
}

TEST_CASE("basins") {
  const auto ns = make("ns_circle", 720);
  const auto& sink = ns.d.at(component_near(ns, 0));
  const auto b = basin(*ns.F, sink, 400);
  CHECK(b.count() > 690);
  CHECK_FALSE(b.contains(360));
  CHECK(basin(*ns.F, CellSet::full(720), 10) == CellSet::full(720));
  const auto L = attractor_from_trapping(*ns.F, TrappingRegion{arc(-0.5, 0.5).realize(*ns.X)}).lambda;
  CHECK(basin_boundary_inclusion(*ns.F, L, 400));

  const auto ms = make("ms4_circle", 720);
  const auto S = attractor_from_trapping(*ms.F, TrappingRegion{arc(-0.3, pi + 0.3).realize(*ms.X)}).lambda;
  CHECK(basin_boundary_inclusion(*ms.F, S, 400));
}

TEST_CASE("boundary refinement study") {
  const auto ms = boundary_refinement_study(builtin("ms4_circle"), arc(-0.3, pi + 0.3), {180, 360, 720}, 60);
  for (const auto& L : ms.levels) {
    CHECK(L.trapping);
    CHECK(L.boundary_components == 2);
    CHECK(L.band_ok);
  }
  CHECK(ms.count_stable);

  USpec half;
  half.kind = USpec::Kind::cells;
  for (Cell c = 0; c < 100; ++c) half.cells.push_back(c);
  const auto sq = boundary_refinement_study(builtin("square_interval"), half, {200}, 60);
  CHECK(sq.levels[0].boundary_components == 1);

  const auto whole = boundary_refinement_study(builtin("cat_torus"), USpec{}, {21, 41}, 5);
  for (const auto& L : whole.levels) CHECK(L.boundary_components == 0);
}
