#include <algorithm>
#include <cmath>
#include <cstring>

#include "dchain/errors.hpp"
#include "exact_detail.hpp"

namespace dchain {

std::uint64_t to_lattice(double v) {
  double w = v - std::floor(v);
  if (!(w < 1.0)) w = 0.0;
  const double s = std::ldexp(w, 64);
  if (!(s < 18446744073709551616.0)) return 0;
  return static_cast<std::uint64_t>(s);
}

double from_lattice(std::uint64_t q) { return std::ldexp(static_cast<double>(q), -64); }

double lattice_distance(const std::array<std::uint64_t, 2>& a, const std::array<std::uint64_t, 2>& b) {
  double d = 0;
  for (int k = 0; k < 2; ++k) {
    const auto diff = static_cast<std::int64_t>(a[k] - b[k]);
    const double v = diff < 0 ? -std::ldexp(static_cast<double>(diff), -64) : std::ldexp(static_cast<double>(diff), -64);
    d = std::max(d, v);
  }
  return d;
}

int limbs_for_steps(const HyperbolicSplitting& H, long steps) {
  return static_cast<int>((64 + detail::guard_bits(H, steps)) / 64);
}

ExactToralPoint::ExactToralPoint(int limbs) : limbs_(limbs), x_(limbs, 0), y_(limbs, 0), tx_(limbs), ty_(limbs) {
  if (limbs < 1) throw ArgumentError("exact point needs at least one limb");
}

ExactToralPoint ExactToralPoint::from_lattice(std::uint64_t x, std::uint64_t y, int limbs) {
  ExactToralPoint p(limbs);
  p.x_.back() = x;
  p.y_.back() = y;
  return p;
}

ExactToralPoint ExactToralPoint::from_point(const Point& p, int limbs) {
  if (p.size() != 2) throw ArgumentError("torus points have two coordinates");
  return from_lattice(to_lattice(p(0)), to_lattice(p(1)), limbs);
}

namespace {

// r = a*u + b*v mod 2^(64n), all operands n limbs.
void combine(mp_limb_t* r, const mp_limb_t* u, int a, const mp_limb_t* v, int b, mp_size_t n) {
  std::memset(r, 0, sizeof(mp_limb_t) * n);
  if (a > 0) mpn_addmul_1(r, u, n, static_cast<mp_limb_t>(a));
  if (a < 0) mpn_submul_1(r, u, n, static_cast<mp_limb_t>(-a));
  if (b > 0) mpn_addmul_1(r, v, n, static_cast<mp_limb_t>(b));
  if (b < 0) mpn_submul_1(r, v, n, static_cast<mp_limb_t>(-b));
}

}  // namespace

void ExactToralPoint::apply(const Eigen::Matrix2i& M) {
  const mp_size_t n = limbs_;
  if (M(0, 0) == 2 && M(0, 1) == 1 && M(1, 0) == 1 && M(1, 1) == 1) {
    mpn_add_n(ty_.data(), x_.data(), y_.data(), n);
    mpn_add_n(x_.data(), ty_.data(), x_.data(), n);
    std::swap(y_, ty_);
    return;
  }
  combine(tx_.data(), x_.data(), M(0, 0), y_.data(), M(0, 1), n);
  combine(ty_.data(), x_.data(), M(1, 0), y_.data(), M(1, 1), n);
  std::swap(x_, tx_);
  std::swap(y_, ty_);
}

Point ExactToralPoint::approx() const {
  auto coord = [&](const std::vector<mp_limb_t>& v) {
    double r = std::ldexp(static_cast<double>(v.back()), -64);
    if (limbs_ > 1) r += std::ldexp(static_cast<double>(v[limbs_ - 2]), -128);
    return r >= 1.0 ? 0.0 : r;
  };
  return point2(coord(x_), coord(y_));
}

namespace detail {

std::vector<mp_limb_t> to_limbs(const mpz_class& z, int limbs) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(64) * limbs);
  std::vector<mp_limb_t> out(limbs, 0);
  const std::size_t used = mpz_size(r.get_mpz_t());
  for (std::size_t i = 0; i < used && i < out.size(); ++i) out[i] = mpz_getlimbn(r.get_mpz_t(), i);
  return out;
}

namespace {

mpz_class round_div(const mpz_class& num, const mpz_class& den) {
  // den > 0
  mpz_class q;
  mpz_class twice = 2 * num + den;
  mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), mpz_class(2 * den).get_mpz_t());
  return q;
}

}  // namespace

Vec2z unstable_projection(const Vec2z& z, const Eigen::Matrix2i& A, long shift) {
  const long tr = A(0, 0) + A(1, 1);
  const long det = static_cast<long>(A(0, 0)) * A(1, 1) - static_cast<long>(A(0, 1)) * A(1, 0);
  const long D = tr * tr - 4 * det;
  const int sigma = tr > 0 ? 1 : -1;
  // M = 2A - tr I; P_u = sigma M / (2 sqrt D) + I/2.
  Vec2z Mz;
  Mz[0] = (2L * A(0, 0) - tr) * z[0] + 2L * A(0, 1) * z[1];
  Mz[1] = 2L * A(1, 0) * z[0] + (2L * A(1, 1) - tr) * z[1];
  const std::size_t zbits = std::max(mpz_sizeinbase(z[0].get_mpz_t(), 2), mpz_sizeinbase(z[1].get_mpz_t(), 2));
  const unsigned long Q = static_cast<unsigned long>(zbits + 8 + shift + 64);
  mpz_class R = mpz_class(D);
  R <<= 2 * Q;
  mpz_sqrt(R.get_mpz_t(), R.get_mpz_t());
  Vec2z out;
  for (int k = 0; k < 2; ++k) {
    mpz_class num = Mz[k];
    num <<= static_cast<unsigned long>(shift) + Q;
    if (sigma < 0) num = -num;
    mpz_class half = z[k];
    // z * 2^(shift-1) rounded; shift >= 1 always here.
    half <<= static_cast<unsigned long>(shift - 1);
    out[k] = round_div(num, 2 * R) + half;
  }
  return out;
}

Vec2z quantize_vector(const Eigen::Vector2d& v) {
  Vec2z out;
  for (int k = 0; k < 2; ++k) {
    mpz_class m;
    const double s = std::ldexp(v(k), 64);
    mpz_set_d(m.get_mpz_t(), std::nearbyint(s));
    out[k] = m;
  }
  return out;
}

long guard_bits(const HyperbolicSplitting& H, long steps) {
  const double growth = std::log2(std::abs(H.lambda_u));
  long g = static_cast<long>(std::ceil(static_cast<double>(std::max(0L, steps)) * growth)) + 64;
  g = (g + 63) / 64 * 64;
  return g;
}

ExactToralPoint make_exact(const std::array<std::uint64_t, 2>& lattice, const Vec2z& offset, long shift, int limbs) {
  ExactToralPoint p(limbs);
  for (int k = 0; k < 2; ++k) {
    mpz_class v(static_cast<unsigned long>(lattice[k]));
    v <<= static_cast<unsigned long>(shift);
    v += offset[k];
    auto l = to_limbs(v, limbs);
    auto& dst = k == 0 ? p.x() : p.y();
    dst = std::move(l);
  }
  return p;
}

namespace {

double signed_limbs_to_double(const std::vector<mp_limb_t>& a, const std::vector<mp_limb_t>& b) {
  const mp_size_t n = static_cast<mp_size_t>(a.size());
  std::vector<mp_limb_t> d(n);
  mpn_sub_n(d.data(), a.data(), b.data(), n);
  const bool negative = (d.back() >> 63) != 0;
  if (negative) mpn_neg(d.data(), d.data(), n);
  double r = 0;
  // Top three nonzero limbs carry more than double precision.
  mp_size_t hi = n - 1;
  while (hi >= 0 && d[hi] == 0) --hi;
  for (mp_size_t i = hi; i >= 0 && i > hi - 3; --i)
    r += std::ldexp(static_cast<double>(d[i]), static_cast<int>(64 * (i - n)));
  return negative ? -r : r;
}

}  // namespace

Eigen::Vector2d exact_difference(const ExactToralPoint& a, const ExactToralPoint& b) {
  if (a.limbs() != b.limbs()) throw ArgumentError("exact points differ in precision");
  return {signed_limbs_to_double(a.x(), b.x()), signed_limbs_to_double(a.y(), b.y())};
}

double exact_distance(const ExactToralPoint& a, const ExactToralPoint& b) {
  return exact_difference(a, b).cwiseAbs().maxCoeff();
}

}  // namespace detail

}  // namespace dchain
