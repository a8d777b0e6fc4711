#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dchain/errors.hpp"
#include "dchain/rng.hpp"
#include "dchain/systems.hpp"

using namespace dchain;
using std::numbers::pi;

namespace {

double circle_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2 * pi);
  return std::min(d, 2 * pi - d);
}

Point random_point(const PointMap& f, Rng& rng) {
  switch (f.domain) {
    case Domain::circle: return point1(rng.uniform(0, 2 * pi));
    case Domain::interval: return point1(rng.uniform());
    case Domain::torus2: return point2(rng.uniform(), rng.uniform());
  }
  return {};
}

}  // namespace

TEST_CASE("builtin examples") {
  const auto cat = builtin("cat_torus");
  CHECK(cat.forward(point2(0, 0)).norm() == 0.0);
  const auto ns = builtin("ns_circle", {0.5});
  CHECK(circle_dist(ns.forward(point1(pi))(0), pi) < 1e-12);

  // Central differences of theta - 0.3 sin 2theta.
  const auto ms4 = builtin("ms4_circle", {0.3});
  auto deriv = [&](double t) {
    const double h = 1e-6;
    return std::remainder(ms4.forward(point1(t + h))(0) - ms4.forward(point1(t - h))(0), 2 * pi) / (2 * h);
  };
  CHECK(deriv(0.0) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(deriv(pi / 2) == doctest::Approx(1.6).epsilon(1e-6));
}

TEST_CASE("builtin configuration errors") {
  CHECK_THROWS_AS(builtin("henon"), ConfigError);
  CHECK_THROWS_AS(builtin("ns_circle", {1.5}), ConfigError);
  CHECK_THROWS_AS(builtin("ms4_circle", {0.5}), ConfigError);
}

TEST_CASE("builtins are invertible") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    CHECK(max_roundtrip_error(builtin(name), 1000, 17) < 1e-9);
  }
}

TEST_CASE("cell maps: duality and outer approximation") {
  const std::vector<std::pair<std::string, int>> cases{
      {"cat_torus", 31}, {"ns_circle", 360}, {"ms4_circle", 360}, {"square_interval", 200},
      {"identity", 100}, {"rotation_circle", 100}};
  for (const auto& [name, n] : cases) {
    CAPTURE(name);
    const auto f = builtin(name);
    const auto space = std::make_shared<const GridSpace>(f.domain == Domain::torus2    ? GridSpace::torus2(n)
                                                         : f.domain == Domain::circle ? GridSpace::circle(n)
                                                                                      : GridSpace::interval(n));
    const auto F = build_cell_map(f, space);
    for (Cell c = 0; c < space->cell_count(); ++c) {
      CHECK(F.forward_set(c).count() >= 1);
      for (Cell d : F.forward(c)) CHECK(F.inverse_set(d).contains(c));
      for (Cell d : F.inverse(c)) CHECK(F.forward_set(d).contains(c));
    }
    Rng rng(23);
    int misses = 0;
    for (int k = 0; k < 10000; ++k) {
      const Point x = random_point(f, rng);
      if (!F.forward_set(space->cell_of(x)).contains(space->cell_of(f.forward(x)))) ++misses;
    }
    CHECK(misses == 0);
  }
}

TEST_CASE("cat map acts on the lattice of cell centers") {
  const auto cat = builtin("cat_torus");
  for (int n : {7, 10, 101}) {
    const auto sp = GridSpace::torus2(n);
    std::vector<int> hit(sp.cell_count(), 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Cell img = center_image_cell(cat, sp, sp.cell_at(i, j));
        CHECK(img == sp.cell_at((2 * i + j) % n, (i + j) % n));
        ++hit[img];
      }
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("identity and fixed point images") {
  const auto sp = std::make_shared<const GridSpace>(GridSpace::circle(360));
  const auto F = build_cell_map(builtin("identity"), sp);
  for (Cell c = 0; c < 360; ++c) CHECK(F.forward_set(c).contains(c));
  const auto G = build_cell_map(builtin("ns_circle", {0.5}), sp);
  CHECK(G.forward_set(180).contains(180));
}

TEST_CASE("pseudo-orbits") {
  const auto cat = builtin("cat_torus");
  const auto exact = generate_pseudo_orbit(cat, point2(0.1, 0.7), 20, 0.0, Noise::uniform, 1);
  Point x = point2(0.1, 0.7);
  for (long i = 0; i <= 20; ++i) {
    CHECK(cat.distance(exact.points[i], x) < 1e-9);
    x = cat.forward(x);
  }

  const auto po = generate_pseudo_orbit(cat, point2(0.3, 0.2), 10000, 1e-8, Noise::uniform, 7);
  CHECK(po.length() == 10000);
  for (long i = 0; i < po.length(); ++i) {
    CHECK(po.step_errors[i] <= 1e-8);
    CHECK(std::abs(cat.distance(cat.forward(po.points[i]), po.points[i + 1]) - po.step_errors[i]) < 1e-12);
  }
  const auto adv = generate_pseudo_orbit(cat, point2(0.3, 0.2), 100, 1e-6, Noise::adversarial, 7);
  for (double e : adv.step_errors) CHECK(e == doctest::Approx(1e-6).epsilon(1e-6));
  const auto again = generate_pseudo_orbit(cat, point2(0.3, 0.2), 100, 1e-6, Noise::adversarial, 7);
  CHECK(again.points == adv.points);

  const auto ns = builtin("ns_circle", {0.5});
  const auto down = generate_pseudo_orbit(ns, point1(pi + 0.01), 100, 0.0, Noise::uniform, 1);
  CHECK(circle_dist(down.points.back()(0), 0.0) < 1e-3);
}

TEST_CASE("limit pseudo-orbits follow their schedule") {
  const auto cat = builtin("cat_torus");
  const auto lpo = generate_limit_pseudo_orbit(cat, point2(0.2, 0.9), 20, 1e-3, 0.5, 4);
  CHECK(lpo.points.size() == 41u);
  CHECK(conforms(lpo));
  for (long i = -20; i < 20; ++i) CHECK(lpo.step_errors[i + 20] <= lpo.schedule_at(i) + kScheduleSlack);
}

TEST_CASE("omega limits") {
  const auto sp = std::make_shared<const GridSpace>(GridSpace::circle(360));
  const auto ns = build_cell_map(builtin("ns_circle", {0.5}), sp);
  const Cell near_one = sp->cell_of(point1(1.0));
  const auto w = omega_limit(ns, near_one, 50, 50);
  CHECK(w.contains(0));
  CHECK(w.count() < 10);
  CHECK(omega_limit(ns, 0, 5, 5).contains(0));

  const auto small = std::make_shared<const GridSpace>(GridSpace::circle(60));
  const auto rot = build_cell_map(builtin("rotation_circle"), small);
  CHECK(omega_limit(rot, 7, 20, 200) == CellSet::full(60));
}
