#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dchain/space.hpp"

namespace dchain {

enum class Domain { circle, torus2, interval };

struct PointMap {
  std::string name;
  std::vector<double> parameters;
  Domain domain = Domain::circle;
  std::function<Point(const Point&)> forward;
  std::function<Point(const Point&)> inverse;
  // Global bound on the expansion of forward in the max metric.
  double lipschitz_bound = 1.0;
  // Bound on the expansion of forward over the max-metric ball of radius r at p.
  std::function<double(const Point&, double)> local_lipschitz;
  // Bound on the expansion of the displacement x -> forward(x) - x over the
  // ball of radius r at p; falls back to local_lipschitz + 1.
  std::function<double(const Point&, double)> displacement_lipschitz;
  // Integer matrix for toral automorphisms; enables exact lattice arithmetic.
  std::optional<Eigen::Matrix2i> linear_part;

  Point wrap(const Point& p) const;
  double distance(const Point& p, const Point& q) const;
  Point iterate(Point p, long steps) const;
  bool compatible(const GridSpace& space) const;
};

// cat_torus, ns_circle, ms4_circle, square_interval, identity, rotation_circle.
PointMap builtin(const std::string& name, const std::vector<double>& parameters = {});
std::vector<std::string> builtin_names();

// Toral automorphism from an integer matrix with determinant ±1.
PointMap toral_automorphism(const Eigen::Matrix2i& A, std::string name = "toral");

// Largest |inverse(forward(x)) - x| over random samples.
double max_roundtrip_error(const PointMap& f, int samples, std::uint64_t seed);

// Combinatorial outer approximation in compressed row form.
class CellMap {
 public:
  CellMap(std::shared_ptr<const GridSpace> space, std::vector<std::vector<Cell>> forward_images);

  const GridSpace& space() const { return *space_; }
  std::shared_ptr<const GridSpace> space_ptr() const { return space_; }
  std::size_t cell_count() const { return space_->cell_count(); }

  std::span<const Cell> forward(Cell c) const;
  std::span<const Cell> inverse(Cell c) const;
  CellSet forward_set(Cell c) const;
  CellSet inverse_set(Cell c) const;
  CellSet image(const CellSet& S) const;
  CellSet preimage(const CellSet& S) const;

  // Expansion bound used when fattening; 0 for maps given as explicit digraphs.
  double lipschitz_bound() const { return lipschitz_; }
  void set_lipschitz_bound(double L) { lipschitz_ = L; }

  // Lower bound on d(f(x), x) over the closed cell (0 when unknown).
  double displacement_floor(Cell c) const { return floor_.empty() ? 0.0 : floor_[c]; }
  void set_displacement_floor(std::vector<double> floor) { floor_ = std::move(floor); }

 private:
  std::shared_ptr<const GridSpace> space_;
  std::vector<std::size_t> fwd_offsets_, inv_offsets_;
  std::vector<Cell> fwd_, inv_;
  double lipschitz_ = 0.0;
  std::vector<double> floor_;
};

CellMap build_cell_map(const PointMap& f, std::shared_ptr<const GridSpace> space);
CellMap build_cell_map(const PointMap& f, const GridSpace& space);

// Cell containing the image of the center of c.
Cell center_image_cell(const PointMap& f, const GridSpace& space, Cell c);

CellSet omega_limit(const CellMap& F, Cell c, int burn_in, int horizon);

enum class Noise { uniform, adversarial };

struct PseudoOrbit {
  std::vector<Point> points;
  double delta = 0;
  std::vector<double> step_errors;

  long length() const { return static_cast<long>(points.size()) - 1; }
};

PseudoOrbit make_pseudo_orbit(const PointMap& f, std::vector<Point> points, double delta);
PseudoOrbit generate_pseudo_orbit(const PointMap& f, const Point& x0, long k, double delta, Noise noise,
                                  std::uint64_t seed);

// Window x_{-m}..x_{m}; points[i + m] holds x_i. step_errors[i + m] is the
// error from x_i to x_{i+1}; schedule[j] bounds errors at |i| = j.
struct LimitPseudoOrbit {
  long m = 0;
  std::vector<Point> points;
  double delta = 0;
  std::vector<double> schedule;
  std::vector<double> step_errors;

  const Point& at(long i) const { return points.at(static_cast<std::size_t>(i + m)); }
  double schedule_at(long i) const { return schedule.at(static_cast<std::size_t>(i < 0 ? -i : i)); }
};

// Absolute slack for schedule conformance (floating point rounding of points).
inline constexpr double kScheduleSlack = 1e-15;

LimitPseudoOrbit make_limit_pseudo_orbit(const PointMap& f, long m, std::vector<Point> points, double delta,
                                         std::vector<double> schedule);
bool conforms(const LimitPseudoOrbit& lpo);

// Errors of size delta * rate^|i| in random directions, built forward from x_{-m}.
LimitPseudoOrbit generate_limit_pseudo_orbit(const PointMap& f, const Point& x_start, long m, double delta,
                                             double rate, std::uint64_t seed);

}  // namespace dchain
