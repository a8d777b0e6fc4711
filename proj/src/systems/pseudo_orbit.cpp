#include <algorithm>
#include <cmath>
#include <numbers>

#include "dchain/errors.hpp"
#include "dchain/rng.hpp"
#include "dchain/systems.hpp"

namespace dchain {

namespace {

int dim(const PointMap& f) { return f.domain == Domain::torus2 ? 2 : 1; }

// Rounding in the wrap can add a few ulps of the coordinate scale.
double wrap_slack(const PointMap& f) { return f.domain == Domain::circle ? 4e-15 : 1e-15; }

Point random_direction(const PointMap& f, Rng& rng) {
  if (dim(f) == 1) return point1(rng.uniform() < 0.5 ? -1.0 : 1.0);
  const double t = rng.uniform(0, 2 * std::numbers::pi);
  return point2(std::cos(t), std::sin(t));
}

Point uniform_offset(const PointMap& f, Rng& rng, double radius) {
  if (dim(f) == 1) return point1(rng.uniform(-radius, radius));
  const double r = radius * std::sqrt(rng.uniform());
  const double t = rng.uniform(0, 2 * std::numbers::pi);
  return point2(r * std::cos(t), r * std::sin(t));
}

}  // namespace

PseudoOrbit make_pseudo_orbit(const PointMap& f, std::vector<Point> points, double delta) {
  if (points.size() < 2) throw ArgumentError("a pseudo-orbit needs at least two points");
  PseudoOrbit po;
  po.delta = delta;
  po.points = std::move(points);
  po.step_errors.reserve(po.points.size() - 1);
  for (std::size_t i = 0; i + 1 < po.points.size(); ++i)
    po.step_errors.push_back(f.distance(f.forward(po.points[i]), po.points[i + 1]));
  return po;
}

PseudoOrbit generate_pseudo_orbit(const PointMap& f, const Point& x0, long k, double delta, Noise noise,
                                  std::uint64_t seed) {
  if (k < 1) throw ArgumentError("pseudo-orbit length must be at least 1");
  if (!(delta >= 0)) throw ArgumentError("delta must be nonnegative");
  Rng rng(seed);
  const double magnitude = std::max(0.0, delta - wrap_slack(f));
  const Point dir = random_direction(f, rng);
  std::vector<Point> pts;
  pts.reserve(k + 1);
  pts.push_back(f.wrap(x0));
  for (long i = 0; i < k; ++i) {
    Point y = f.forward(pts.back());
    if (delta > 0) y += noise == Noise::adversarial ? Point(magnitude * dir) : uniform_offset(f, rng, magnitude);
    pts.push_back(f.wrap(y));
  }
  return make_pseudo_orbit(f, std::move(pts), delta);
}

LimitPseudoOrbit make_limit_pseudo_orbit(const PointMap& f, long m, std::vector<Point> points, double delta,
                                         std::vector<double> schedule) {
  if (m < 1) throw ArgumentError("window half-width must be at least 1");
  if (points.size() != static_cast<std::size_t>(2 * m + 1)) throw ArgumentError("window needs 2m+1 points");
  if (schedule.size() != static_cast<std::size_t>(m + 1)) throw ArgumentError("schedule needs m+1 entries");
  for (std::size_t j = 0; j < schedule.size(); ++j)
    if (!(schedule[j] > 0) || (j && schedule[j] > schedule[j - 1]))
      throw ArgumentError("schedule must be positive and nonincreasing");
  LimitPseudoOrbit lpo;
  lpo.m = m;
  lpo.points = std::move(points);
  lpo.delta = delta;
  lpo.schedule = std::move(schedule);
  for (long i = -m; i < m; ++i) lpo.step_errors.push_back(f.distance(f.forward(lpo.at(i)), lpo.at(i + 1)));
  return lpo;
}

bool conforms(const LimitPseudoOrbit& lpo) {
  for (long i = -lpo.m; i < lpo.m; ++i) {
    const double e = lpo.step_errors[static_cast<std::size_t>(i + lpo.m)];
    if (e > lpo.schedule_at(i) + kScheduleSlack || e > lpo.delta + kScheduleSlack) return false;
  }
  return true;
}

LimitPseudoOrbit generate_limit_pseudo_orbit(const PointMap& f, const Point& x_start, long m, double delta,
                                             double rate, std::uint64_t seed) {
  if (!(rate > 0 && rate < 1)) throw ArgumentError("decay rate must lie in (0,1)");
  Rng rng(seed);
  std::vector<double> schedule(m + 1);
  for (long j = 0; j <= m; ++j) schedule[j] = delta * std::pow(rate, static_cast<double>(j));
  std::vector<Point> pts;
  pts.reserve(2 * m + 1);
  pts.push_back(f.wrap(x_start));
  for (long i = -m; i < m; ++i) {
    const double eta = std::max(0.0, schedule[static_cast<std::size_t>(std::abs(i))] - wrap_slack(f));
    Point y = f.forward(pts.back()) + eta * random_direction(f, rng);
    pts.push_back(f.wrap(y));
  }
  return make_limit_pseudo_orbit(f, m, std::move(pts), delta, std::move(schedule));
}

}  // namespace dchain
