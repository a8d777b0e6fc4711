#include <algorithm>
#include <cmath>
#include <numbers>

#include "dchain/errors.hpp"
#include "dchain/rng.hpp"
#include "dchain/systems.hpp"

namespace dchain {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0;
  return t;
}

double wrap_unit(double t) {
  t -= std::floor(t);
  if (t >= 1.0) t = 0;
  return t;
}

// Solves g(t) = y for increasing g with |g(t) - t| <= spread.
double invert_increasing(const std::function<double(double)>& g, const std::function<double(double)>& dg, double y,
                         double spread) {
  double lo = y - spread, hi = y + spread, t = y;
  for (int it = 0; it < 100; ++it) {
    double r = g(t) - y;
    if (r == 0) break;
    if (r > 0)
      hi = t;
    else
      lo = t;
    double next = t - r / dg(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-17 * (1 + std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

PointMap circle_map(std::string name, std::vector<double> params) {
  PointMap f;
  f.name = std::move(name);
  f.parameters = std::move(params);
  f.domain = Domain::circle;
  return f;
}

}  // namespace

Point PointMap::wrap(const Point& p) const {
  Point q = p;
  switch (domain) {
    case Domain::circle: q[0] = wrap_angle(p[0]); break;
    case Domain::torus2:
      q[0] = wrap_unit(p[0]);
      q[1] = wrap_unit(p[1]);
      break;
    case Domain::interval: q[0] = std::clamp(p[0], 0.0, 1.0); break;
  }
  return q;
}

double PointMap::distance(const Point& p, const Point& q) const {
  switch (domain) {
    case Domain::circle: {
      double d = std::fmod(std::abs(p[0] - q[0]), kTwoPi);
      return std::min(d, kTwoPi - d);
    }
    case Domain::torus2: {
      double d = 0;
      for (int a = 0; a < 2; ++a) {
        double t = std::fmod(std::abs(p[a] - q[a]), 1.0);
        d = std::max(d, std::min(t, 1.0 - t));
      }
      return d;
    }
    case Domain::interval: return std::abs(p[0] - q[0]);
  }
  return 0;
}

Point PointMap::iterate(Point p, long steps) const {
  if (steps >= 0)
    for (long i = 0; i < steps; ++i) p = forward(p);
  else
    for (long i = 0; i < -steps; ++i) p = inverse(p);
  return p;
}

bool PointMap::compatible(const GridSpace& space) const {
  switch (domain) {
    case Domain::circle:
      return space.kind() == SpaceKind::circle && std::abs(space.axes()[0].length - kTwoPi) < 1e-12;
    case Domain::torus2:
      return space.dimension() == 2 && space.axes()[0].periodic && space.axes()[1].periodic &&
             space.axes()[0].length == 1.0 && space.axes()[1].length == 1.0;
    case Domain::interval:
      return space.kind() == SpaceKind::interval && space.axes()[0].length == 1.0;
  }
  return false;
}

PointMap toral_automorphism(const Eigen::Matrix2i& A, std::string name) {
  const int det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  if (det != 1 && det != -1) throw ConfigError("toral automorphism needs determinant +-1");
  const Eigen::Matrix2i Ainv = (Eigen::Matrix2i() << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0)).finished() * det;
  const Eigen::Matrix2d Ad = A.cast<double>(), Aid = Ainv.cast<double>();
  PointMap f;
  f.name = std::move(name);
  f.parameters = {double(A(0, 0)), double(A(0, 1)), double(A(1, 0)), double(A(1, 1))};
  f.domain = Domain::torus2;
  f.linear_part = A;
  f.forward = [Ad](const Point& p) {
    Eigen::Vector2d q = Ad * Eigen::Vector2d(p[0], p[1]);
    return point2(wrap_unit(q[0]), wrap_unit(q[1]));
  };
  f.inverse = [Aid](const Point& p) {
    Eigen::Vector2d q = Aid * Eigen::Vector2d(p[0], p[1]);
    return point2(wrap_unit(q[0]), wrap_unit(q[1]));
  };
  // Max-norm operator norm: largest absolute row sum.
  const double L = Ad.cwiseAbs().rowwise().sum().maxCoeff();
  f.lipschitz_bound = L;
  f.local_lipschitz = [L](const Point&, double) { return L; };
  const Eigen::Matrix2d D = Ad - Eigen::Matrix2d::Identity();
  const double Ld = D.cwiseAbs().rowwise().sum().maxCoeff();
  f.displacement_lipschitz = [Ld](const Point&, double) { return Ld; };
  return f;
}

std::vector<std::string> builtin_names() {
  return {"cat_torus", "ns_circle", "ms4_circle", "square_interval", "identity", "rotation_circle"};
}

PointMap builtin(const std::string& name, const std::vector<double>& params) {
  auto expect_at_most = [&](std::size_t n) {
    if (params.size() > n) throw ConfigError(name + ": too many parameters");
  };
  if (name == "cat_torus") {
    if (params.empty()) return toral_automorphism((Eigen::Matrix2i() << 2, 1, 1, 1).finished(), name);
    if (params.size() != 4) throw ConfigError("cat_torus takes no parameters or a 2x2 integer matrix");
    Eigen::Matrix2i A;
    for (int i = 0; i < 4; ++i) {
      if (params[i] != std::round(params[i])) throw ConfigError("cat_torus matrix entries must be integers");
      A(i / 2, i % 2) = static_cast<int>(params[i]);
    }
    PointMap f = toral_automorphism(A, name);
    const double tr = A.trace(), det = A.determinant();
    if (tr * tr - 4 * det <= 0 || std::abs(tr) <= 1 + det) throw ConfigError("cat_torus matrix is not hyperbolic");
    return f;
  }
  if (name == "ns_circle") {
    expect_at_most(1);
    const double a = params.empty() ? 0.5 : params[0];
    if (!(a > 0 && a < 1)) throw ConfigError("ns_circle needs 0 < a < 1");
    PointMap f = circle_map(name, {a});
    f.forward = [a](const Point& p) { return point1(wrap_angle(p[0] - a * std::sin(p[0]))); };
    f.inverse = [a](const Point& p) {
      double t = invert_increasing([a](double t) { return t - a * std::sin(t); },
                                   [a](double t) { return 1 - a * std::cos(t); }, p[0], a);
      return point1(wrap_angle(t));
    };
    f.lipschitz_bound = 1 + a;
    f.local_lipschitz = [a](const Point& p, double r) {
      return std::min(1 + a, std::abs(1 - a * std::cos(p[0])) + a * r);
    };
    f.displacement_lipschitz = [a](const Point& p, double r) {
      return std::min(a, a * std::abs(std::cos(p[0])) + a * r);
    };
    return f;
  }
  if (name == "ms4_circle") {
    expect_at_most(1);
    const double a = params.empty() ? 0.3 : params[0];
    if (!(a > 0 && a < 0.5)) throw ConfigError("ms4_circle needs 0 < a < 1/2");
    PointMap f = circle_map(name, {a});
    f.forward = [a](const Point& p) { return point1(wrap_angle(p[0] - a * std::sin(2 * p[0]))); };
    f.inverse = [a](const Point& p) {
      double t = invert_increasing([a](double t) { return t - a * std::sin(2 * t); },
                                   [a](double t) { return 1 - 2 * a * std::cos(2 * t); }, p[0], a);
      return point1(wrap_angle(t));
    };
    f.lipschitz_bound = 1 + 2 * a;
    f.local_lipschitz = [a](const Point& p, double r) {
      return std::min(1 + 2 * a, std::abs(1 - 2 * a * std::cos(2 * p[0])) + 4 * a * r);
    };
    f.displacement_lipschitz = [a](const Point& p, double r) {
      return std::min(2 * a, 2 * a * std::abs(std::cos(2 * p[0])) + 4 * a * r);
    };
    return f;
  }
  if (name == "square_interval") {
    expect_at_most(0);
    PointMap f;
    f.name = name;
    f.domain = Domain::interval;
    f.forward = [](const Point& p) {
      double x = std::clamp(p[0], 0.0, 1.0);
      return point1(x * x);
    };
    f.inverse = [](const Point& p) { return point1(std::sqrt(std::clamp(p[0], 0.0, 1.0))); };
    f.lipschitz_bound = 2;
    f.local_lipschitz = [](const Point& p, double r) { return 2 * std::min(1.0, p[0] + r); };
    f.displacement_lipschitz = [](const Point& p, double r) { return std::min(1.0, std::abs(2 * p[0] - 1) + 2 * r); };
    return f;
  }
  if (name == "identity") {
    expect_at_most(0);
    PointMap f = circle_map(name, {});
    f.forward = [](const Point& p) { return point1(wrap_angle(p[0])); };
    f.inverse = f.forward;
    f.local_lipschitz = [](const Point&, double) { return 1.0; };
    f.displacement_lipschitz = [](const Point&, double) { return 0.0; };
    return f;
  }
  if (name == "rotation_circle") {
    expect_at_most(1);
    const double alpha = params.empty() ? kTwoPi * (std::sqrt(5.0) - 1) / 2 : params[0];
    if (!std::isfinite(alpha)) throw ConfigError("rotation_circle needs a finite angle");
    PointMap f = circle_map(name, {alpha});
    f.forward = [alpha](const Point& p) { return point1(wrap_angle(p[0] + alpha)); };
    f.inverse = [alpha](const Point& p) { return point1(wrap_angle(p[0] - alpha)); };
    f.local_lipschitz = [](const Point&, double) { return 1.0; };
    f.displacement_lipschitz = [](const Point&, double) { return 0.0; };
    return f;
  }
  throw ConfigError("unknown system: " + name);
}

double max_roundtrip_error(const PointMap& f, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < samples; ++i) {
    Point x;
    switch (f.domain) {
      case Domain::circle: x = point1(rng.uniform(0, kTwoPi)); break;
      case Domain::torus2: x = point2(rng.uniform(), rng.uniform()); break;
      case Domain::interval: x = point1(rng.uniform()); break;
    }
    worst = std::max(worst, f.distance(f.inverse(f.forward(x)), x));
  }
  return worst;
}

}  // namespace dchain
