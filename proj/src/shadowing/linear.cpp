#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>

#include "dchain/errors.hpp"
#include "exact_detail.hpp"

namespace dchain {

namespace {

constexpr std::int64_t kLiftLimit = std::int64_t{1} << 62;  // 0.25 of the fundamental domain

std::array<std::uint64_t, 2> lattice_of(const Point& p) { return {to_lattice(p(0)), to_lattice(p(1))}; }

// e = q1 - A q0 on the 2^-64 lattice, lifted to the nearest representative.
std::array<std::int64_t, 2> lattice_defect(const Eigen::Matrix2i& A, const std::array<std::uint64_t, 2>& q0,
                                           const std::array<std::uint64_t, 2>& q1) {
  std::array<std::int64_t, 2> e{};
  for (int r = 0; r < 2; ++r) {
    const std::uint64_t img = static_cast<std::uint64_t>(static_cast<std::int64_t>(A(r, 0))) * q0[0] +
                              static_cast<std::uint64_t>(static_cast<std::int64_t>(A(r, 1))) * q0[1];
    e[r] = static_cast<std::int64_t>(q1[r] - img);
    if (e[r] >= kLiftLimit || e[r] <= -kLiftLimit) throw LiftAmbiguity("pseudo-orbit step too large to lift");
  }
  return e;
}

Eigen::Matrix2i inverse_of(const Eigen::Matrix2i& A) {
  const int det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  Eigen::Matrix2i inv;
  inv << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
  return det * inv;
}

struct Recursion {
  std::vector<double> cs, cu;  // stable / unstable coordinates of the corrections
  double max_a = 0, max_b = 0;
};

double correction_norm(const HyperbolicSplitting& H, double s, double u) {
  return (s * H.e_s + u * H.e_u).cwiseAbs().maxCoeff();
}

struct Refinement {
  double sigma = 0, mu = 0, sup = 0;
};

double ternary(const std::function<double(double)>& g, double lo, double hi, int iters) {
  for (int it = 0; it < iters; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (g(m1) <= g(m2))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

// sup_i |c_i| as a function of the free stable start sigma and unstable end mu.
class SupObjective {
 public:
  SupObjective(const HyperbolicSplitting& H, const Recursion& R) : H_(H), R_(R) {
    const std::size_t n = R.cs.size();
    ps_.resize(n);
    pu_.resize(n);
    double p = 1;
    for (std::size_t i = 0; i < n; ++i, p *= H.lambda_s) ps_[i] = p;
    p = 1;
    for (std::size_t i = n; i-- > 0; p /= H.lambda_u) pu_[i] = p;
  }
  double operator()(double sigma, double mu, std::size_t lo = 0, std::size_t hi = SIZE_MAX) const {
    hi = std::min(hi, R_.cs.size());
    double m = 0;
    for (std::size_t i = lo; i < hi; ++i)
      m = std::max(m, correction_norm(H_, R_.cs[i] + ps_[i] * sigma, R_.cu[i] + pu_[i] * mu));
    return m;
  }
  std::size_t size() const { return R_.cs.size(); }

 private:
  const HyperbolicSplitting& H_;
  const Recursion& R_;
  std::vector<double> ps_, pu_;
};

Refinement refine(const SupObjective& obj) {
  Refinement best{0, 0, obj(0, 0)};
  if (best.sup == 0) return best;
  const double box = 4 * best.sup;
  const std::size_t n = obj.size();
  Refinement cand;
  if (n <= 129) {
    auto inner = [&](double s) {
      return obj(s, ternary([&](double u) { return obj(s, u); }, -box, box, 70));
    };
    cand.sigma = ternary(inner, -box, box, 70);
    cand.mu = ternary([&](double u) { return obj(cand.sigma, u); }, -box, box, 70);
  } else {
    const std::size_t H = 64;
    cand.sigma = ternary([&](double s) { return obj(s, 0, 0, H); }, -box, box, 80);
    cand.mu = ternary([&](double u) { return obj(0, u, n - H, n); }, -box, box, 80);
  }
  cand.sup = obj(cand.sigma, cand.mu);
  return cand.sup < best.sup ? cand : best;
}

// Active limbs needed with `remaining` steps left.
mp_size_t active_limbs(const HyperbolicSplitting& H, long remaining, mp_size_t total) {
  const long bits = 64 + detail::guard_bits(H, remaining) + 64;
  return std::min<mp_size_t>(total, bits / 64);
}

void step_limbs(const Eigen::Matrix2i& A, mp_limb_t* x, mp_limb_t* y, mp_limb_t* tx, mp_limb_t* ty, mp_size_t n) {
  if (A(0, 0) == 2 && A(0, 1) == 1 && A(1, 0) == 1 && A(1, 1) == 1) {
    mpn_add_n(ty, x, y, n);
    mpn_add_n(x, ty, x, n);
    std::memcpy(y, ty, sizeof(mp_limb_t) * n);
    return;
  }
  auto comb = [&](mp_limb_t* r, int a, int b) {
    std::memset(r, 0, sizeof(mp_limb_t) * n);
    if (a > 0) mpn_addmul_1(r, x, n, static_cast<mp_limb_t>(a));
    if (a < 0) mpn_submul_1(r, x, n, static_cast<mp_limb_t>(-a));
    if (b > 0) mpn_addmul_1(r, y, n, static_cast<mp_limb_t>(b));
    if (b < 0) mpn_submul_1(r, y, n, static_cast<mp_limb_t>(-b));
  };
  comb(tx, A(0, 0), A(0, 1));
  comb(ty, A(1, 0), A(1, 1));
  std::memcpy(x, tx, sizeof(mp_limb_t) * n);
  std::memcpy(y, ty, sizeof(mp_limb_t) * n);
}

// sup_i d(q_i, A^i x*) re-simulated on the lattice; low limbs are dropped once
// they can no longer reach the top limb before the end of the chain.
double simulate_sup(const HyperbolicSplitting& H, const ExactToralPoint& start,
                    const std::vector<std::array<std::uint64_t, 2>>& q) {
  std::vector<mp_limb_t> x = start.x(), y = start.y();
  const mp_size_t N = static_cast<mp_size_t>(x.size());
  std::vector<mp_limb_t> tx(N), ty(N);
  const long k = static_cast<long>(q.size()) - 1;
  double sup = 0;
  for (long i = 0;; ++i) {
    sup = std::max(sup, lattice_distance({x.back(), y.back()}, q[i]));
    if (i == k) break;
    const mp_size_t n = active_limbs(H, k - i, N);
    step_limbs(H.matrix, x.data() + (N - n), y.data() + (N - n), tx.data(), ty.data(), n);
  }
  return sup;
}

}  // namespace

LinearShadow shadow_linear_hyperbolic(const HyperbolicSplitting& H, const PseudoOrbit& po,
                                      LinearShadowOptions options) {
  const long k = po.length();
  if (k < 1) throw ArgumentError("pseudo-orbit must have at least one step");
  const Eigen::Matrix2i& A = H.matrix;
  std::vector<std::array<std::uint64_t, 2>> q(k + 1);
  for (long i = 0; i <= k; ++i) {
    if (po.points[i].size() != 2) throw ArgumentError("linear solver needs torus points");
    q[i] = lattice_of(po.points[i]);
  }
  std::vector<std::array<std::int64_t, 2>> e(k);
  Recursion R;
  R.cs.assign(k + 1, 0);
  R.cu.assign(k + 1, 0);
  std::vector<double> a(k), b(k);
  for (long i = 0; i < k; ++i) {
    e[i] = lattice_defect(A, q[i], q[i + 1]);
    const Eigen::Vector2d ed(std::ldexp(static_cast<double>(e[i][0]), -64),
                             std::ldexp(static_cast<double>(e[i][1]), -64));
    const Eigen::Vector2d ab = H.to_eigen * ed;
    a[i] = ab(0);
    b[i] = ab(1);
    R.max_a = std::max(R.max_a, std::abs(a[i]));
    R.max_b = std::max(R.max_b, std::abs(b[i]));
  }
  for (long i = 0; i < k; ++i) R.cs[i + 1] = H.lambda_s * R.cs[i] - b[i];
  for (long i = k; i-- > 0;) R.cu[i] = (R.cu[i + 1] + a[i]) / H.lambda_u;

  SupObjective obj(H, R);
  Refinement ref{0, 0, 0};
  if (options.refine)
    ref = refine(obj);
  else
    ref.sup = obj(0, 0);

  // Exact start: unstable part by backward Horner, stable part from sigma.
  const long G = detail::guard_bits(H, k);
  const int limbs = static_cast<int>((64 + G) / 64);
  const Eigen::Matrix2i Ainv = inverse_of(A);
  detail::Vec2z w = detail::quantize_vector(ref.mu * H.e_u);
  for (long j = k; j-- > 0;) {
    const mpz_class t0 = w[0] + e[j][0];
    const mpz_class t1 = w[1] + e[j][1];
    w[0] = Ainv(0, 0) * t0 + Ainv(0, 1) * t1;
    w[1] = Ainv(1, 0) * t0 + Ainv(1, 1) * t1;
  }
  const detail::Vec2z vs = detail::quantize_vector(ref.sigma * H.e_s);
  detail::Vec2z z{w[0] - vs[0], w[1] - vs[1]};
  detail::Vec2z c0 = detail::unstable_projection(z, A, G);
  for (int r = 0; r < 2; ++r) c0[r] += vs[r] << static_cast<unsigned long>(G);
  auto exact = std::make_shared<ExactToralPoint>(detail::make_exact(q[0], c0, G, limbs));

  LinearShadow out;
  out.bound = R.max_b / (1 - std::abs(H.lambda_s)) + R.max_a / (std::abs(H.lambda_u) - 1);
  out.x = ShadowPoint{exact->approx(), exact};
  auto& cert = out.certificate;
  cert.orbit_start = out.x;
  cert.method = ShadowMethod::exact_linear;
  cert.predicted_error = ref.sup;
  if (options.certify) {
    cert.sup_error = simulate_sup(H, *exact, q);
    cert.verified = std::abs(cert.sup_error - cert.predicted_error) <= 1e-10 &&
                    cert.sup_error <= out.bound * (1 + 1e-9) + 1e-15;
  } else {
    cert.sup_error = ref.sup;
  }
  return out;
}

std::vector<Point> orbit_window(const PointMap& f, const ShadowPoint& x, long lo, long hi) {
  if (lo > 0 || hi < 0) throw ArgumentError("orbit window must contain index 0");
  std::vector<Point> out(static_cast<std::size_t>(hi - lo + 1));
  if (x.exact && f.linear_part) {
    const Eigen::Matrix2i A = *f.linear_part;
    const Eigen::Matrix2i Ainv = inverse_of(A);
    ExactToralPoint p = *x.exact;
    for (long i = 0; i <= hi; ++i) {
      out[i - lo] = p.approx();
      if (i < hi) p.apply(A);
    }
    p = *x.exact;
    for (long i = 0; i >= lo; --i) {
      out[i - lo] = p.approx();
      if (i > lo) p.apply(Ainv);
    }
    return out;
  }
  Point p = f.wrap(x.approx);
  for (long i = 0; i <= hi; ++i) {
    out[i - lo] = p;
    if (i < hi) p = f.forward(p);
  }
  p = f.wrap(x.approx);
  for (long i = 0; i >= lo; --i) {
    out[i - lo] = p;
    if (i > lo) p = f.inverse(p);
  }
  return out;
}

double sup_error(const PointMap& f, const PseudoOrbit& po, const Point& x) {
  Point p = f.wrap(x);
  double m = 0;
  for (std::size_t i = 0; i < po.points.size(); ++i) {
    m = std::max(m, f.distance(po.points[i], p));
    if (i + 1 < po.points.size()) p = f.forward(p);
  }
  return m;
}

bool verify_shadowing(const PointMap& f, const PseudoOrbit& po, const ShadowPoint& x, double epsilon) {
  const auto orbit = orbit_window(f, x, 0, po.length());
  for (std::size_t i = 0; i < orbit.size(); ++i)
    if (f.distance(po.points[i], orbit[i]) > epsilon) return false;
  return true;
}

bool verify_shadowing(const PointMap& f, const PseudoOrbit& po, const Point& x, double epsilon) {
  return verify_shadowing(f, po, ShadowPoint{x, nullptr}, epsilon);
}

LimitShadowCheck check_limit_shadowing(const PointMap& f, const LimitPseudoOrbit& lpo, const ShadowPoint& x,
                                       double epsilon, const std::vector<double>& tail_schedule) {
  const long m = lpo.m;
  if (tail_schedule.size() != static_cast<std::size_t>(m + 1))
    throw ArgumentError("tail schedule needs m+1 entries");
  const auto orbit = orbit_window(f, x, -m, m);
  LimitShadowCheck r;
  r.errors.resize(orbit.size());
  for (long i = -m; i <= m; ++i) {
    const double d = f.distance(lpo.at(i), orbit[i + m]);
    r.errors[i + m] = d;
    r.sup_error = std::max(r.sup_error, d);
    const long j = std::abs(i);
    if (3 * j > m && d > tail_schedule[j] && r.tails_ok) {
      r.tails_ok = false;
      r.tail_violation = i;
    }
  }
  r.passed = r.sup_error <= epsilon && r.tails_ok;
  return r;
}

bool verify_limit_shadowing(const PointMap& f, const LimitPseudoOrbit& lpo, const ShadowPoint& x, double epsilon,
                            const std::vector<double>& tail_schedule) {
  return check_limit_shadowing(f, lpo, x, epsilon, tail_schedule).passed;
}

GluedOrbit glue_orbits_linear(const HyperbolicSplitting& H, const PointMap& f, const Point& x, const Point& y,
                              long window) {
  if (window < 1) throw ArgumentError("window must be at least 1");
  if (!f.linear_part || *f.linear_part != H.matrix) throw ArgumentError("map does not match the splitting");
  const auto qx = lattice_of(f.wrap(x)), qy = lattice_of(f.wrap(y));
  detail::Vec2z e;
  for (int r = 0; r < 2; ++r) {
    const auto d = static_cast<std::int64_t>(qy[r] - qx[r]);
    if (d >= kLiftLimit || d <= -kLiftLimit) throw LiftAmbiguity("points too far apart to lift the defect");
    e[r] = mpz_class(static_cast<long>(d));
  }
  // Enough bits that quantizing z stays below the decayed distances at the window ends.
  const long G = detail::guard_bits(H, 2 * window) + 128;
  const int limbs = static_cast<int>((64 + G) / 64);
  const detail::Vec2z zero{mpz_class(0), mpz_class(0)};
  const ExactToralPoint ex = detail::make_exact(qx, zero, G, limbs);
  const ExactToralPoint ey = detail::make_exact(qy, zero, G, limbs);
  const ExactToralPoint ez = detail::make_exact(qx, detail::unstable_projection(e, H.matrix, G), G, limbs);

  GluedOrbit out;
  const long m = window;
  std::vector<Point> pts(2 * m + 1);
  const Eigen::Matrix2i Ainv = inverse_of(H.matrix);
  ExactToralPoint px = ex, pz = ez;
  for (long j = 0; j <= m; ++j) {
    out.backward_errors.push_back(detail::exact_distance(px, pz));
    if (j >= 1) pts[m - j] = px.approx();
    px.apply(Ainv);
    pz.apply(Ainv);
  }
  ExactToralPoint py = ey;
  pz = ez;
  for (long j = 0; j <= m; ++j) {
    out.forward_errors.push_back(detail::exact_distance(py, pz));
    pts[m + j] = py.approx();
    py.apply(H.matrix);
    pz.apply(H.matrix);
  }
  const double defect = std::max(f.distance(f.forward(pts[m - 1]), pts[m]), 1e-300);
  std::vector<double> schedule(m + 1);
  for (long j = 0; j <= m; ++j) schedule[j] = defect * std::pow(0.5, static_cast<double>(std::max(0L, j - 1)));
  out.lpo = make_limit_pseudo_orbit(f, m, std::move(pts), defect, std::move(schedule));
  out.z = ShadowPoint{ez.approx(), std::make_shared<ExactToralPoint>(ez)};
  return out;
}

Membership stable_unstable_membership(const PointMap& f, const Point& base, const Point& probe, int horizon,
                                      double tol) {
  if (horizon < 1) throw ArgumentError("horizon must be at least 1");
  auto stays = [&](bool forward) {
    Point p = f.wrap(base), q = f.wrap(probe);
    for (int i = 1; i <= horizon; ++i) {
      p = forward ? f.forward(p) : f.inverse(p);
      q = forward ? f.forward(q) : f.inverse(q);
      if (f.distance(p, q) > tol) return false;
    }
    return true;
  };
  return {stays(true), stays(false)};
}

}  // namespace dchain
