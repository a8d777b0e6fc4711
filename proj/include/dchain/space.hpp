#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "dchain/cell_set.hpp"

namespace dchain {

// Points of the ambient spaces have one or two coordinates.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

inline Point point1(double x) {
  Point p(1);
  p << x;
  return p;
}

inline Point point2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

enum class SpaceKind { circle, torus2, interval, product, abstract_finite };

const char* to_string(SpaceKind k);

// Absolute tolerance for metric comparisons, relative to axis length.
inline constexpr double kMetricTolerance = 1e-12;

struct Axis {
  int cells = 1;
  double length = 1.0;
  bool periodic = false;

  double spacing() const;
  double center(int i) const { return i * spacing(); }
  double distance(double a, double b) const;
  double wrap(double x) const;
};

// Uniform grid on circle, torus, interval or a two-axis product, or an
// abstract finite metric space with an explicit cell adjacency.
// Cells of the grid kinds are numbered with axis 0 fastest.
class GridSpace {
 public:
  static GridSpace circle(int n);
  static GridSpace torus2(int n) { return torus2(n, n); }
  static GridSpace torus2(int nx, int ny);
  static GridSpace interval(int n);
  static GridSpace product(Axis a, Axis b);
  // Discrete metric, every cell adjacent only to itself.
  static GridSpace discrete(int n);
  // Symmetric distance matrix; adjacency lists need not contain the cell itself.
  static GridSpace abstract(Eigen::MatrixXd distances, std::vector<std::vector<Cell>> adjacency);

  SpaceKind kind() const { return kind_; }
  std::size_t cell_count() const { return count_; }
  int dimension() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  bool is_grid() const { return kind_ != SpaceKind::abstract_finite; }

  // Half the diameter of one cell in the max metric; zero for abstract spaces.
  double cell_radius() const;
  // Largest axis spacing (one cell); 1 for abstract spaces.
  double spacing() const;
  double tolerance() const;
  double diameter() const;

  Point center(Cell c) const;
  Cell cell_of(const Point& p) const;
  Point wrap(const Point& p) const;

  double metric(Cell a, Cell b) const;
  double point_distance(const Point& p, const Point& q) const;

  std::array<int, 2> index(Cell c) const;
  Cell cell_at(int i, int j = 0) const;

  std::vector<Cell> adjacent(Cell c) const;

  const Eigen::MatrixXd& distances() const { return *dist_; }

 private:
  void check(Cell c) const;

  SpaceKind kind_ = SpaceKind::abstract_finite;
  std::vector<Axis> axes_;
  std::size_t count_ = 0;
  std::shared_ptr<const Eigen::MatrixXd> dist_;
  std::shared_ptr<const std::vector<std::vector<Cell>>> adj_;
};

// Enclosure of the closed r-ball around S: every cell whose center is within
// r + cell_radius of some center of S.
CellSet closed_neighborhood(const GridSpace& space, const CellSet& S, double r);

// Box dilation by a number of cells per axis (periodic axes wrap).
CellSet dilate_cells(const GridSpace& space, const CellSet& S, const std::array<int, 2>& radius);

struct Topology {
  CellSet closure;
  CellSet interior;
  CellSet boundary;
};

// Topology of the union of closed cells under the adjacency relation.
Topology topology(const GridSpace& space, const CellSet& S);
CellSet closure(const GridSpace& space, const CellSet& S);
CellSet interior(const GridSpace& space, const CellSet& S);
CellSet boundary(const GridSpace& space, const CellSet& S);
bool is_clopen(const GridSpace& space, const CellSet& S);

// Components ordered by smallest cell index.
std::vector<CellSet> connected_components(const GridSpace& space, const CellSet& S);

double distance_to_set(const GridSpace& space, Cell c, const CellSet& S);
double set_distance(const GridSpace& space, const CellSet& A, const CellSet& B);
double hausdorff_distance(const GridSpace& space, const CellSet& A, const CellSet& B);

}  // namespace dchain
