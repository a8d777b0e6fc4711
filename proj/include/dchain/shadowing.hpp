#pragma once

#include <gmp.h>

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dchain/systems.hpp"
#include "dchain/verdict.hpp"

namespace dchain {

// Eigen-data of a hyperbolic 2x2 integer matrix with determinant ±1.
template <class Scalar>
struct HyperbolicSplittingT {
  Eigen::Matrix2i matrix;
  Scalar lambda_u = 0, lambda_s = 0;  // signed eigenvalues, |lambda_u| > 1 > |lambda_s|
  Eigen::Matrix<Scalar, 2, 1> e_u, e_s;
  Scalar K = 0;  // 1/(1-|lambda_s|) + 1/(|lambda_u|-1)
  // Rows give the (unstable, stable) coordinates of a vector.
  Eigen::Matrix<Scalar, 2, 2> to_eigen;
};

using HyperbolicSplitting = HyperbolicSplittingT<double>;

template <class Scalar>
HyperbolicSplittingT<Scalar> hyperbolic_splitting(const Eigen::Matrix2i& A) {
  using std::abs;
  using std::sqrt;
  const int det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  if (det != 1 && det != -1) throw std::invalid_argument("matrix must have determinant +-1");
  const Scalar tr = Scalar(A.trace());
  const Scalar disc = tr * tr - Scalar(4 * det);
  if (!(disc > 0)) throw std::invalid_argument("matrix has no real splitting");
  const Scalar r = sqrt(disc);
  Scalar lp = (tr + r) / 2, lm = (tr - r) / 2;
  HyperbolicSplittingT<Scalar> H;
  H.matrix = A;
  H.lambda_u = abs(lp) > abs(lm) ? lp : lm;
  H.lambda_s = abs(lp) > abs(lm) ? lm : lp;
  if (!(abs(H.lambda_u) > 1 && abs(H.lambda_s) < 1)) throw std::invalid_argument("matrix is not hyperbolic");
  auto eigvec = [&](Scalar lam) {
    // (A - lam I) v = 0: pick the better-conditioned row.
    Eigen::Matrix<Scalar, 2, 1> v;
    const Scalar a = Scalar(A(0, 0)) - lam, b = Scalar(A(0, 1));
    const Scalar c = Scalar(A(1, 0)), d = Scalar(A(1, 1)) - lam;
    if (abs(a) + abs(b) >= abs(c) + abs(d))
      v << b, -a;
    else
      v << d, -c;
    v /= v.norm();
    if (v(0) < 0 || (v(0) == 0 && v(1) < 0)) v = -v;
    return v;
  };
  H.e_u = eigvec(H.lambda_u);
  H.e_s = eigvec(H.lambda_s);
  Eigen::Matrix<Scalar, 2, 2> V;
  V.col(0) = H.e_u;
  V.col(1) = H.e_s;
  H.to_eigen = V.inverse();
  H.K = 1 / (1 - abs(H.lambda_s)) + 1 / (abs(H.lambda_u) - 1);
  return H;
}

inline HyperbolicSplitting hyperbolic_splitting(const Eigen::Matrix2i& A) { return hyperbolic_splitting<double>(A); }

// Torus point with 64*limbs fraction bits per coordinate, stored as
// little-endian limbs; wraparound of the limb array is reduction mod 1.
class ExactToralPoint {
 public:
  ExactToralPoint() = default;
  explicit ExactToralPoint(int limbs);

  static ExactToralPoint from_lattice(std::uint64_t x, std::uint64_t y, int limbs);
  static ExactToralPoint from_point(const Point& p, int limbs);

  int limbs() const { return limbs_; }
  void apply(const Eigen::Matrix2i& M);
  std::array<std::uint64_t, 2> top() const { return {x_.back(), y_.back()}; }
  Point approx() const;

  std::vector<mp_limb_t>& x() { return x_; }
  std::vector<mp_limb_t>& y() { return y_; }
  const std::vector<mp_limb_t>& x() const { return x_; }
  const std::vector<mp_limb_t>& y() const { return y_; }

 private:
  int limbs_ = 0;
  std::vector<mp_limb_t> x_, y_, tx_, ty_;
};

// Lattice helpers (2^-64 grid on the unit torus).
std::uint64_t to_lattice(double v);
double from_lattice(std::uint64_t q);
double lattice_distance(const std::array<std::uint64_t, 2>& a, const std::array<std::uint64_t, 2>& b);
// Limbs needed to follow an orbit for `steps` iterations with 64 guard bits.
int limbs_for_steps(const HyperbolicSplitting& H, long steps);

struct ShadowPoint {
  Point approx;
  std::shared_ptr<const ExactToralPoint> exact;
};

// f^i(x) for i in [lo, hi]; exact lattice arithmetic when x carries an exact
// representation and f is a toral automorphism.
std::vector<Point> orbit_window(const PointMap& f, const ShadowPoint& x, long lo, long hi);

enum class ShadowMethod { exact_linear, empirical_search };

struct ShadowingCertificate {
  ShadowPoint orbit_start;
  double sup_error = 0;         // re-simulated
  double predicted_error = 0;   // from the correction recursion
  std::vector<double> backward_tail, forward_tail;
  ShadowMethod method = ShadowMethod::exact_linear;
  bool verified = false;
};

struct LinearShadowOptions {
  bool refine = true;   // optimize the free stable/unstable parameters
  bool certify = true;  // exact re-simulation
};

struct LinearShadow {
  ShadowPoint x;
  double bound = 0;  // realized geometric-series bound, <= K * delta
  ShadowingCertificate certificate;
};

LinearShadow shadow_linear_hyperbolic(const HyperbolicSplitting& H, const PseudoOrbit& po,
                                      LinearShadowOptions options = {});

double sup_error(const PointMap& f, const PseudoOrbit& po, const Point& x);
bool verify_shadowing(const PointMap& f, const PseudoOrbit& po, const ShadowPoint& x, double epsilon);
bool verify_shadowing(const PointMap& f, const PseudoOrbit& po, const Point& x, double epsilon);

struct LimitShadowCheck {
  bool passed = false;
  double sup_error = 0;
  std::vector<double> errors;  // index i + m
  bool tails_ok = true;
  long tail_violation = 0;  // first window index whose error exceeds the schedule
};

// tail_schedule[j] bounds the error at |i| = j on the outer thirds of the window.
LimitShadowCheck check_limit_shadowing(const PointMap& f, const LimitPseudoOrbit& lpo, const ShadowPoint& x,
                                       double epsilon, const std::vector<double>& tail_schedule);
bool verify_limit_shadowing(const PointMap& f, const LimitPseudoOrbit& lpo, const ShadowPoint& x, double epsilon,
                            const std::vector<double>& tail_schedule);

struct GluedOrbit {
  LimitPseudoOrbit lpo;
  ShadowPoint z;
  // backward_errors[j] = d(f^-j x, f^-j z), forward_errors[j] = d(f^j y, f^j z), j = 0..m.
  std::vector<double> backward_errors, forward_errors;
};

GluedOrbit glue_orbits_linear(const HyperbolicSplitting& H, const PointMap& f, const Point& x, const Point& y,
                              long window);

struct Membership {
  bool in_Ws = false;
  bool in_Wu = false;
};

Membership stable_unstable_membership(const PointMap& f, const Point& base, const Point& probe, int horizon,
                                      double tol);

// Local search for a point whose orbit follows the chain within epsilon.
std::optional<Point> search_shadow(const PointMap& f, const PseudoOrbit& po, double epsilon);

struct ModulusRung {
  double delta = 0;
  bool passed = false;
  int failures = 0;
};

struct ModulusEstimate {
  double delta_estimate = 0;
  std::vector<ModulusRung> rungs;
};

ModulusEstimate estimate_shadowing_modulus(const PointMap& f, const GridSpace& space, const CellSet& region,
                                           double epsilon, int trials, long chain_length, std::uint64_t seed);

struct ExpansivityEstimate {
  double e_estimate = 0;
  double min_sup = 0;
  bool vacuous = false;  // no sampled pair stayed in the region
  Point witness_x, witness_y;
  std::size_t pairs = 0;
};

ExpansivityEstimate estimate_expansivity(const PointMap& f, const GridSpace& space, const CellSet& region,
                                         int horizon, int pair_grid);

struct Lemma21Options {
  int expansivity_horizon = 30;
  int pair_grid = 32;
  double min_expansivity = 1e-3;
  int trials = 4;
  long chain_length = 200;
  int lpo_count = 8;
  long lpo_window = 16;
  double lpo_rate = 0.6;
  std::uint64_t seed = 1;
};

struct Lemma21Report {
  ExpansivityEstimate expansivity;
  bool expansivity_met = false;
  double shadowing_delta = 0;
  bool shadowing_certified = false;  // exact solver certificates
  bool shadowing_met = false;
  int lpo_tested = 0;
  int lpo_shadowed = 0;
  std::vector<std::string> counterexamples;
  Verdict verdict = Verdict::hypotheses_not_met;
};

Lemma21Report lemma21_pipeline(const PointMap& f, const GridSpace& space, const CellSet& region, double b, double c,
                               const Lemma21Options& options = {});

}  // namespace dchain
