#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "dchain/errors.hpp"
#include "dchain/parallel.hpp"
#include "dchain/rng.hpp"
#include "dchain/shadowing.hpp"

namespace dchain {

namespace {

int dim(const PointMap& f) { return f.domain == Domain::torus2 ? 2 : 1; }

// Objective with a cap: may return any value > cap once the cap is exceeded.
using CappedObjective = std::function<double(const Point&, double)>;

struct SearchResult {
  Point x;
  double value = std::numeric_limits<double>::infinity();
};

// Compass search: step doubles after a successful move, halves otherwise.
SearchResult pattern_search(const PointMap& f, const CappedObjective& obj, const Point& seed, double step,
                            double target) {
  SearchResult r{f.wrap(seed), obj(f.wrap(seed), std::numeric_limits<double>::infinity())};
  const int d = dim(f);
  for (int it = 0; it < 400 && step > 1e-17 && r.value > target; ++it) {
    bool moved = false;
    for (int axis = 0; axis < d && !moved; ++axis)
      for (double sgn : {1.0, -1.0}) {
        Point cand = r.x;
        cand(axis) += sgn * step;
        cand = f.wrap(cand);
        const double v = obj(cand, r.value);
        if (v < r.value) {
          r = {cand, v};
          moved = true;
          break;
        }
      }
    step = moved ? 2 * step : 0.5 * step;
  }
  return r;
}

double chain_objective(const PointMap& f, const PseudoOrbit& po, const Point& x, double cap) {
  Point p = x;
  double m = 0;
  for (std::size_t i = 0; i < po.points.size(); ++i) {
    m = std::max(m, f.distance(po.points[i], p));
    if (m > cap) return m;
    if (i + 1 < po.points.size()) p = f.forward(p);
  }
  return m;
}

// max over the window of d_i / w_i, w_i = epsilon inside and the tail
// schedule on the outer thirds; <= 1 iff the limit-shadowing check passes.
double window_objective(const PointMap& f, const LimitPseudoOrbit& lpo, const Point& x, double epsilon,
                        const std::vector<double>& psi, double cap) {
  auto weight = [&](long i) {
    const long j = std::abs(i);
    return 3 * j > lpo.m ? std::min(epsilon, psi[j]) : epsilon;
  };
  double m = f.distance(lpo.at(0), x) / weight(0);
  Point p = x;
  for (long i = 1; i <= lpo.m && m <= cap; ++i) {
    p = f.forward(p);
    m = std::max(m, f.distance(lpo.at(i), p) / weight(i));
  }
  p = x;
  for (long i = 1; i <= lpo.m && m <= cap; ++i) {
    p = f.inverse(p);
    m = std::max(m, f.distance(lpo.at(-i), p) / weight(-i));
  }
  return m;
}

Point random_point_in(const GridSpace& space, const std::vector<Cell>& cells, Rng& rng) {
  const Cell c = cells[rng.below(cells.size())];
  Point p = space.center(c);
  const double h = space.cell_radius();
  for (int k = 0; k < p.size(); ++k) p(k) += rng.uniform(-h, h);
  return space.wrap(p);
}

}  // namespace

std::optional<Point> search_shadow(const PointMap& f, const PseudoOrbit& po, double epsilon) {
  const long k = po.length();
  const double step = std::max(4 * po.delta, 1e-12);
  CappedObjective obj = [&](const Point& x, double cap) { return chain_objective(f, po, x, cap); };
  for (long j : {0L, k / 2, k}) {
    const Point seed = f.iterate(po.points[j], -j);
    const auto r = pattern_search(f, obj, seed, step, epsilon);
    if (r.value <= epsilon && verify_shadowing(f, po, r.x, epsilon)) return r.x;
  }
  return std::nullopt;
}

ModulusEstimate estimate_shadowing_modulus(const PointMap& f, const GridSpace& space, const CellSet& region,
                                           double epsilon, int trials, long chain_length, std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("trials must be at least 1");
  if (chain_length < 1) throw ArgumentError("chain length must be at least 1");
  ModulusEstimate est;
  const auto cells = region.to_vector();
  if (cells.empty()) return est;
  std::vector<Point> starts;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    starts.push_back(random_point_in(space, cells, rng));
  }
  for (int j = 0; j <= 40; ++j) {
    ModulusRung rung;
    rung.delta = 0.1 * std::ldexp(1.0, -j);
    for (int t = 0; t < trials && rung.failures == 0; ++t)
      for (Noise noise : {Noise::uniform, Noise::adversarial}) {
        const auto stream = 2 * static_cast<std::uint64_t>(t) + (noise == Noise::adversarial ? 1 : 0);
        const auto po = generate_pseudo_orbit(f, starts[t], chain_length, rung.delta, noise,
                                              mix_seed(seed ^ 0x5bd1e995ULL, stream));
        if (!search_shadow(f, po, epsilon)) {
          ++rung.failures;
          break;
        }
      }
    rung.passed = rung.failures == 0;
    est.rungs.push_back(rung);
    if (rung.passed) {
      est.delta_estimate = rung.delta;
      break;
    }
  }
  return est;
}

ExpansivityEstimate estimate_expansivity(const PointMap& f, const GridSpace& space, const CellSet& region,
                                         int horizon, int pair_grid) {
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  if (pair_grid < 1) throw ArgumentError("pair grid must be at least 1");
  ExpansivityEstimate est;
  const auto cells = region.to_vector();
  const int d = dim(f);
  const std::size_t want = d == 2 ? static_cast<std::size_t>(pair_grid) * pair_grid : 4 * static_cast<std::size_t>(pair_grid);
  const std::size_t count = std::min(want, cells.size());
  const bool whole = region.count() == space.cell_count();
  std::vector<Point> dirs;
  if (d == 1)
    dirs = {point1(1.0)};
  else
    dirs = {point2(1, 0), point2(0, 1), point2(M_SQRT1_2, M_SQRT1_2), point2(M_SQRT1_2, -M_SQRT1_2)};
  const double seps[] = {1e-3, 1e-5, 1e-7};

  auto inside = [&](const Point& p) { return whole || region.contains(space.cell_of(p)); };
  double min_sup = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < count; ++s) {
    const Cell c = cells[s * cells.size() / count];
    Point x = space.center(c);
    for (int k = 0; k < d; ++k) x(k) += 0.29 * space.cell_radius();
    x = f.wrap(x);
    for (double sep : seps)
      for (const Point& dir : dirs) {
        const Point y = f.wrap(x + sep * dir);
        if (!inside(x) || !inside(y)) continue;
        double sup = f.distance(x, y);
        bool admissible = true;
        for (int sgn : {1, -1}) {
          Point p = x, q = y;
          for (int i = 1; i <= horizon && admissible; ++i) {
            p = sgn > 0 ? f.forward(p) : f.inverse(p);
            q = sgn > 0 ? f.forward(q) : f.inverse(q);
            if (!inside(p) || !inside(q)) admissible = false;
            sup = std::max(sup, f.distance(p, q));
          }
        }
        if (!admissible) continue;
        ++est.pairs;
        if (sup < min_sup) {
          min_sup = sup;
          est.witness_x = x;
          est.witness_y = y;
        }
      }
  }
  if (est.pairs == 0) {
    est.vacuous = true;
    est.e_estimate = 0.5;
    est.min_sup = std::numeric_limits<double>::infinity();
    return est;
  }
  est.min_sup = min_sup;
  for (int j = 0; j <= 60; ++j) {
    const double e = 0.5 * std::ldexp(1.0, -j);
    if (e < min_sup) {
      est.e_estimate = e;
      break;
    }
  }
  return est;
}

Lemma21Report lemma21_pipeline(const PointMap& f, const GridSpace& space, const CellSet& region, double b, double c,
                               const Lemma21Options& options) {
  if (!(0 < b && b < c)) throw ArgumentError("need 0 < b < c");
  Lemma21Report rep;
  const CellSet Bc = closed_neighborhood(space, region, c);
  const CellSet Bb = closed_neighborhood(space, region, b);

  rep.expansivity = estimate_expansivity(f, space, Bc, options.expansivity_horizon, options.pair_grid);
  rep.expansivity_met = rep.expansivity.vacuous || rep.expansivity.e_estimate >= options.min_expansivity;
  if (!rep.expansivity_met) return rep;

  const double epsilon = 0.5 * (rep.expansivity.vacuous ? c - b : std::min(rep.expansivity.e_estimate, c - b));
  const bool linear = f.linear_part.has_value();
  std::optional<HyperbolicSplitting> H;
  if (linear) H = hyperbolic_splitting(*f.linear_part);
  const auto cells = Bc.to_vector();

  if (linear) {
    rep.shadowing_delta = epsilon / H->K;
    bool ok = true;
    for (int t = 0; t < options.trials && ok; ++t) {
      Rng rng(mix_seed(options.seed, 100 + t));
      const Point x0 = random_point_in(space, cells, rng);
      for (Noise noise : {Noise::uniform, Noise::adversarial}) {
        const auto po = generate_pseudo_orbit(f, x0, options.chain_length, rep.shadowing_delta, noise,
                                              mix_seed(options.seed, 200 + 2 * t + (noise == Noise::adversarial)));
        const auto sh = shadow_linear_hyperbolic(*H, po);
        ok = ok && sh.certificate.verified && sh.certificate.sup_error <= epsilon;
      }
    }
    rep.shadowing_certified = ok;
    rep.shadowing_met = ok;
  } else {
    const auto est = estimate_shadowing_modulus(f, space, Bc, epsilon, options.trials, options.chain_length,
                                                options.seed);
    rep.shadowing_delta = est.delta_estimate;
    rep.shadowing_met = est.delta_estimate > 0;
  }
  if (!rep.shadowing_met) return rep;

  const long m = options.lpo_window;
  const double dL = rep.shadowing_delta;
  const double rho = linear ? std::max({options.lpo_rate, std::abs(H->lambda_s), 1 / std::abs(H->lambda_u)})
                            : options.lpo_rate;
  const double floor = linear ? 1e-15 : 1e-12;
  std::vector<double> psi(m + 1);
  for (long j = 0; j <= m; ++j) psi[j] = 10 * dL * std::pow(rho, static_cast<double>(j)) + floor;
  const auto bcells = Bb.to_vector();

  auto record = [&](const std::string& what, const LimitShadowCheck& chk) {
    ++rep.lpo_tested;
    if (chk.passed) {
      ++rep.lpo_shadowed;
      return;
    }
    std::ostringstream os;
    os << what << ": sup " << chk.sup_error << " (eps " << epsilon << ")";
    if (!chk.tails_ok) os << ", tail exceeds schedule at i=" << chk.tail_violation;
    rep.counterexamples.push_back(os.str());
  };

  for (int t = 0; t < options.lpo_count; ++t) {
    Rng rng(mix_seed(options.seed, 1000 + t));
    const Point xs = random_point_in(space, bcells, rng);
    const auto lpo = generate_limit_pseudo_orbit(f, xs, m, dL, options.lpo_rate, mix_seed(options.seed, 2000 + t));
    ShadowPoint shadow;
    if (linear) {
      const auto po = make_pseudo_orbit(f, lpo.points, lpo.delta);
      const auto sh = shadow_linear_hyperbolic(*H, po, {false, false});
      ExactToralPoint p = *sh.x.exact;
      for (long i = 0; i < m; ++i) p.apply(H->matrix);
      shadow = ShadowPoint{p.approx(), std::make_shared<ExactToralPoint>(p)};
    } else {
      CappedObjective obj = [&](const Point& x, double cap) {
        return window_objective(f, lpo, x, epsilon, psi, cap);
      };
      SearchResult best;
      for (const Point& seed : {f.iterate(lpo.at(-m), m), lpo.at(0), f.iterate(lpo.at(m), -m)}) {
        const auto r = pattern_search(f, obj, seed, std::max(4 * dL, 1e-12), 0.0);
        if (r.value < best.value) best = r;
      }
      shadow = ShadowPoint{best.x, nullptr};
    }
    record("limit pseudo-orbit " + std::to_string(t), check_limit_shadowing(f, lpo, shadow, epsilon, psi));
    if (linear) {
      Rng grng(mix_seed(options.seed, 3000 + t));
      const Point x = random_point_in(space, bcells, grng);
      const double ang = grng.uniform(0, 2 * M_PI);
      const Point y = f.wrap(x + 0.5 * dL * point2(std::cos(ang), std::sin(ang)));
      const auto g = glue_orbits_linear(*H, f, x, y, m);
      std::vector<double> gpsi(m + 1);
      for (long j = 0; j <= m; ++j) gpsi[j] = 10 * dL * std::pow(rho, static_cast<double>(j)) + floor;
      record("glued orbit " + std::to_string(t), check_limit_shadowing(f, g.lpo, g.z, epsilon, gpsi));
    }
  }
  rep.verdict = rep.lpo_shadowed == rep.lpo_tested ? Verdict::pass : Verdict::fail;
  return rep;
}

}  // namespace dchain
