#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dchain/errors.hpp"
#include "dchain/harness/suites.hpp"
#include "dchain/rng.hpp"
#include "dchain/shadowing.hpp"

using namespace dchain;

namespace {

const Eigen::Matrix2i kCat = (Eigen::Matrix2i() << 2, 1, 1, 1).finished();

}  // namespace

TEST_CASE("hyperbolic splitting of the cat matrix") {
  const auto H = hyperbolic_splitting(kCat);
  const double r5 = std::sqrt(5.0);
  CHECK(H.lambda_u == doctest::Approx((3 + r5) / 2).epsilon(1e-14));
  CHECK(H.lambda_s == doctest::Approx((3 - r5) / 2).epsilon(1e-14));
  // 1/(1 - lambda_s) + 1/(lambda_u - 1) simplifies to sqrt 5.
  CHECK(H.K == doctest::Approx(r5).epsilon(1e-14));
  CHECK(H.K == doctest::Approx(2.23607).epsilon(1e-6));
  const Eigen::Matrix2d A = kCat.cast<double>();
  CHECK((A * H.e_u - H.lambda_u * H.e_u).norm() < 1e-14);
  CHECK((A * H.e_s - H.lambda_s * H.e_s).norm() < 1e-14);
  CHECK_THROWS(hyperbolic_splitting(Eigen::Matrix2i::Identity()));
  CHECK_THROWS(hyperbolic_splitting((Eigen::Matrix2i() << 2, 0, 0, 1).finished()));
}

TEST_CASE("exact toral points") {
  const auto cat = builtin("cat_torus");
  const Point x = point2(0.1234, 0.9876);
  auto e = ExactToralPoint::from_point(x, 3);
  Point y = x;
  for (int i = 0; i < 20; ++i) {
    e.apply(kCat);
    y = cat.forward(y);
  }
  CHECK(cat.distance(e.approx(), y) < 1e-6);
  for (double v : {0.0, 0.25, 0.5, 0.999}) CHECK(from_lattice(to_lattice(v)) == v);
  const auto H = hyperbolic_splitting(kCat);
  CHECK(limbs_for_steps(H, 10000) > limbs_for_steps(H, 100));
}

TEST_CASE("linear shadowing meets the K delta bound") {
  const auto cat = builtin("cat_torus");
  const auto H = hyperbolic_splitting(kCat);
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const Noise noise = t % 2 ? Noise::adversarial : Noise::uniform;
    const auto po = generate_pseudo_orbit(cat, point2(rng.uniform(), rng.uniform()), 2000, 1e-8, noise, rng.next());
    const auto s = shadow_linear_hyperbolic(H, po);
    CHECK(s.bound <= H.K * 1e-8 * (1 + 1e-9));
    CHECK(s.certificate.verified);
    CHECK(s.certificate.sup_error <= H.K * 1e-8 * (1 + 1e-6));
    CHECK(verify_shadowing(cat, po, s.x, H.K * 1e-8 * (1 + 1e-6)));
  }
}

TEST_CASE("short-chain solver matches brute-force minimax") {
  const auto cat = builtin("cat_torus");
  const auto H = hyperbolic_splitting(kCat);
  for (int t = 0; t < 6; ++t) {
    const auto po = generate_pseudo_orbit(cat, point2(0.3 + 0.05 * t, 0.6), 4 + t, 1e-3, Noise::adversarial, 40 + t);
    const double solver = shadow_linear_hyperbolic(H, po).certificate.sup_error;
    const double brute = harness::minimax_shadow_error(cat, po);
    CHECK(solver <= 1.1 * brute);
    CHECK(brute <= solver * (1 + 1e-6));
  }
}

TEST_CASE("glued orbits lie in the unstable and stable sets") {
  const auto cat = builtin("cat_torus");
  const auto H = hyperbolic_splitting(kCat);
  const Point x = point2(0.31, 0.47);
  const Point y = cat.wrap(x + point2(0.6e-6, -0.8e-6));
  const auto G = glue_orbits_linear(H, cat, x, y, 30);
  CHECK(G.backward_errors.back() < G.backward_errors.front() + 1e-15);
  CHECK(G.forward_errors.back() < 1e-12);
  const auto mu = stable_unstable_membership(cat, x, G.z.approx, 20, 1e-5);
  const auto ms = stable_unstable_membership(cat, y, G.z.approx, 20, 1e-5);
  CHECK(mu.in_Wu);
  CHECK(ms.in_Ws);
  CHECK_THROWS_AS(glue_orbits_linear(H, builtin("identity"), x, y, 10), ArgumentError);
}

TEST_CASE("stable and unstable directions") {
  const auto cat = builtin("cat_torus");
  const auto H = hyperbolic_splitting(kCat);
  const Point base = point2(0.5, 0.5);
  const Point on_s = cat.wrap(base + 1e-6 * H.e_s);
  const Point on_u = cat.wrap(base + 1e-6 * H.e_u);
  CHECK(stable_unstable_membership(cat, base, on_s, 20, 1e-5).in_Ws);
  CHECK_FALSE(stable_unstable_membership(cat, base, on_s, 20, 1e-5).in_Wu);
  CHECK(stable_unstable_membership(cat, base, on_u, 20, 1e-5).in_Wu);
  CHECK_FALSE(stable_unstable_membership(cat, base, on_u, 20, 1e-5).in_Ws);
}

TEST_CASE("limit shadowing of decaying pseudo-orbits") {
  const auto cat = builtin("cat_torus");
  const auto H = hyperbolic_splitting(kCat);
  const auto lpo = generate_limit_pseudo_orbit(cat, point2(0.2, 0.4), 24, 1e-6, 0.5, 9);
  PseudoOrbit po = make_pseudo_orbit(cat, lpo.points, 1e-6);
  const auto s = shadow_linear_hyperbolic(H, po);
  // The solver shadows x_{-m}; the check wants the point paired with x_0.
  REQUIRE(s.x.exact);
  auto e = std::make_shared<ExactToralPoint>(*s.x.exact);
  for (int i = 0; i < 24; ++i) e->apply(kCat);
  ShadowPoint start{e->approx(), e};
  std::vector<double> sched(25);
  for (long j = 0; j <= 24; ++j) sched[j] = 1.0;
  const auto chk = check_limit_shadowing(cat, lpo, start, H.K * 1e-6 * 1.01, sched);
  CHECK(chk.sup_error <= H.K * 1e-6 * 1.01);
}

TEST_CASE("empirical search on a contracting region") {
  const auto ns = builtin("ns_circle", {0.5});
  const auto po = generate_pseudo_orbit(ns, point1(0.05), 200, 1e-4, Noise::uniform, 3);
  const auto x = search_shadow(ns, po, 1e-3);
  REQUIRE(x.has_value());
  CHECK(sup_error(ns, po, *x) <= 1e-3);
}

TEST_CASE("expansivity estimates") {
  const auto cat = builtin("cat_torus");
  const auto X = GridSpace::torus2(64);
  const auto e = estimate_expansivity(cat, X, CellSet::full(X.cell_count()), 30, 32);
  CHECK(e.e_estimate >= harness::kExpansivityBaseline);

  const auto id = builtin("identity");
  const auto C = GridSpace::circle(360);
  CHECK(estimate_expansivity(id, C, CellSet::full(360), 30, 32).e_estimate < 1e-3);
  CHECK_THROWS_AS(estimate_expansivity(id, C, CellSet::full(360), 0, 32), ArgumentError);
}

TEST_CASE("shadowing modulus collapses without hyperbolicity") {
  const auto C = GridSpace::circle(72);
  for (const std::string name : {"identity", "rotation_circle"}) {
    CAPTURE(name);
    const auto m = estimate_shadowing_modulus(builtin(name), C, CellSet::full(72), 0.01, 4, 720, 2);
    CHECK(m.delta_estimate < harness::kModulusCollapse);
  }
  // Near an attracting fixed point chains are easy to follow.
  const auto C360 = GridSpace::circle(360);
  CellSet near_zero(360);
  for (int i = -10; i <= 10; ++i) near_zero.insert(static_cast<Cell>((i + 360) % 360));
  const auto ns = estimate_shadowing_modulus(builtin("ns_circle", {0.5}), C360, near_zero, 0.01, 4, 200, 2);
  CHECK(ns.delta_estimate >= harness::kModulusCollapse);
}

TEST_CASE("L-shadowing pipeline") {
  const auto cat = builtin("cat_torus");
  const auto T = GridSpace::torus2(32);
  const auto rep = lemma21_pipeline(cat, T, CellSet(1024, {0}), 0.1, 0.2);
  CHECK(rep.expansivity_met);
  CHECK(rep.shadowing_certified);
  CHECK(rep.lpo_tested > 0);
  CHECK(rep.verdict == Verdict::pass);

  const auto id = lemma21_pipeline(builtin("identity"), GridSpace::circle(72), CellSet(72, {0}), 0.1, 0.2);
  CHECK_FALSE(id.expansivity_met);
  CHECK(id.verdict == Verdict::hypotheses_not_met);
  CHECK_THROWS_AS(lemma21_pipeline(cat, T, CellSet(1024, {0}), 0.2, 0.1), ArgumentError);
}
