#include <algorithm>
#include <cmath>
#include <numbers>

#include "dchain/errors.hpp"
#include "dchain/space.hpp"

namespace dchain {

const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::circle: return "circle";
    case SpaceKind::torus2: return "torus2";
    case SpaceKind::interval: return "interval";
    case SpaceKind::product: return "product";
    case SpaceKind::abstract_finite: return "abstract";
  }
  return "?";
}

double Axis::spacing() const {
  if (periodic) return length / cells;
  return cells > 1 ? length / (cells - 1) : length;
}

double Axis::distance(double a, double b) const {
  double d = std::abs(a - b);
  if (periodic) {
    d = std::fmod(d, length);
    d = std::min(d, length - d);
  }
  return d;
}

double Axis::wrap(double x) const {
  if (periodic) {
    x = std::fmod(x, length);
    if (x < 0) x += length;
    if (x >= length) x = 0;
    return x;
  }
  return std::clamp(x, 0.0, length);
}

GridSpace GridSpace::circle(int n) {
  if (n < 3) throw ArgumentError("circle grid needs at least 3 cells");
  return product(Axis{n, 2 * std::numbers::pi, true}, Axis{0, 0, false});
}

GridSpace GridSpace::torus2(int nx, int ny) {
  if (nx < 3 || ny < 3) throw ArgumentError("torus grid needs at least 3 cells per axis");
  GridSpace s = product(Axis{nx, 1.0, true}, Axis{ny, 1.0, true});
  s.kind_ = SpaceKind::torus2;
  return s;
}

GridSpace GridSpace::interval(int n) {
  if (n < 2) throw ArgumentError("interval grid needs at least 2 cells");
  GridSpace s = product(Axis{n, 1.0, false}, Axis{0, 0, false});
  s.kind_ = SpaceKind::interval;
  return s;
}

// An axis with zero cells is omitted, which yields the one-dimensional kinds.
GridSpace GridSpace::product(Axis a, Axis b) {
  GridSpace s;
  if (a.cells < 1 || a.length <= 0) throw ArgumentError("invalid first axis");
  s.axes_.push_back(a);
  if (b.cells > 0) {
    if (b.length <= 0) throw ArgumentError("invalid second axis");
    s.axes_.push_back(b);
    s.kind_ = SpaceKind::product;
  } else {
    s.kind_ = a.periodic ? SpaceKind::circle : SpaceKind::interval;
  }
  s.count_ = 1;
  for (const auto& ax : s.axes_) s.count_ *= static_cast<std::size_t>(ax.cells);
  return s;
}

GridSpace GridSpace::discrete(int n) {
  if (n < 1) throw ArgumentError("abstract space needs at least one cell");
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(n, n);
  d.diagonal().setZero();
  return abstract(std::move(d), std::vector<std::vector<Cell>>(n));
}

GridSpace GridSpace::abstract(Eigen::MatrixXd distances, std::vector<std::vector<Cell>> adjacency) {
  const auto n = distances.rows();
  if (n < 1 || distances.cols() != n) throw ArgumentError("distance matrix must be square and nonempty");
  if (static_cast<Eigen::Index>(adjacency.size()) != n) throw ArgumentError("adjacency size mismatch");
  if ((distances - distances.transpose()).cwiseAbs().maxCoeff() > 0 || distances.diagonal().cwiseAbs().maxCoeff() > 0)
    throw ArgumentError("distance matrix must be symmetric with zero diagonal");
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& row = adjacency[i];
    for (Cell c : row)
      if (c >= n) throw ArgumentError("adjacency index out of range");
    row.push_back(static_cast<Cell>(i));
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Cell c : adjacency[i])
      if (!std::binary_search(adjacency[c].begin(), adjacency[c].end(), static_cast<Cell>(i)))
        throw ArgumentError("adjacency must be symmetric");
  GridSpace s;
  s.kind_ = SpaceKind::abstract_finite;
  s.count_ = static_cast<std::size_t>(n);
  s.dist_ = std::make_shared<const Eigen::MatrixXd>(std::move(distances));
  s.adj_ = std::make_shared<const std::vector<std::vector<Cell>>>(std::move(adjacency));
  return s;
}

double GridSpace::cell_radius() const {
  if (!is_grid()) return 0.0;
  double r = 0;
  for (const auto& ax : axes_) r = std::max(r, ax.spacing() / 2);
  return r;
}

double GridSpace::spacing() const {
  if (!is_grid()) return 1.0;
  double h = 0;
  for (const auto& ax : axes_) h = std::max(h, ax.spacing());
  return h;
}

double GridSpace::tolerance() const {
  if (!is_grid()) return kMetricTolerance * std::max(1.0, dist_->maxCoeff());
  double l = 0;
  for (const auto& ax : axes_) l = std::max(l, ax.length);
  return kMetricTolerance * l;
}

double GridSpace::diameter() const {
  if (!is_grid()) return dist_->maxCoeff();
  double d = 0;
  for (const auto& ax : axes_) d = std::max(d, ax.periodic ? ax.length / 2 : ax.length);
  return d;
}

void GridSpace::check(Cell c) const {
  if (c >= count_) throw ArgumentError("cell index out of range");
}

std::array<int, 2> GridSpace::index(Cell c) const {
  check(c);
  if (axes_.size() == 2) return {static_cast<int>(c % axes_[0].cells), static_cast<int>(c / axes_[0].cells)};
  return {static_cast<int>(c), 0};
}

Cell GridSpace::cell_at(int i, int j) const {
  if (!is_grid()) {
    if (i < 0 || static_cast<std::size_t>(i) >= count_ || j != 0) throw ArgumentError("cell index out of range");
    return static_cast<Cell>(i);
  }
  auto norm = [](const Axis& ax, int k) {
    if (ax.periodic) return ((k % ax.cells) + ax.cells) % ax.cells;
    if (k < 0 || k >= ax.cells) throw ArgumentError("cell index out of range");
    return k;
  };
  int a = norm(axes_[0], i);
  if (axes_.size() == 1) {
    if (j != 0) throw ArgumentError("cell index out of range");
    return static_cast<Cell>(a);
  }
  return static_cast<Cell>(a + axes_[0].cells * norm(axes_[1], j));
}

Point GridSpace::center(Cell c) const {
  check(c);
  if (!is_grid()) return point1(static_cast<double>(c));
  auto ij = index(c);
  if (axes_.size() == 1) return point1(axes_[0].center(ij[0]));
  return point2(axes_[0].center(ij[0]), axes_[1].center(ij[1]));
}

Cell GridSpace::cell_of(const Point& p) const {
  if (!is_grid()) throw ArgumentError("abstract spaces have no ambient points");
  if (p.size() != dimension()) throw ArgumentError("point dimension mismatch");
  std::array<int, 2> ij{0, 0};
  for (int a = 0; a < dimension(); ++a) {
    const Axis& ax = axes_[a];
    long k = std::lround(ax.wrap(p[a]) / ax.spacing());
    if (ax.periodic)
      k = ((k % ax.cells) + ax.cells) % ax.cells;
    else
      k = std::clamp<long>(k, 0, ax.cells - 1);
    ij[a] = static_cast<int>(k);
  }
  return cell_at(ij[0], ij[1]);
}

Point GridSpace::wrap(const Point& p) const {
  if (!is_grid()) return p;
  Point q = p;
  for (int a = 0; a < dimension(); ++a) q[a] = axes_[a].wrap(p[a]);
  return q;
}

double GridSpace::metric(Cell a, Cell b) const {
  check(a);
  check(b);
  if (!is_grid()) return (*dist_)(a, b);
  auto ia = index(a), ib = index(b);
  double d = 0;
  for (int k = 0; k < dimension(); ++k) {
    const Axis& ax = axes_[k];
    int di = std::abs(ia[k] - ib[k]);
    if (ax.periodic) di = std::min(di, ax.cells - di);
    d = std::max(d, di * ax.spacing());
  }
  return d;
}

double GridSpace::point_distance(const Point& p, const Point& q) const {
  if (!is_grid()) throw ArgumentError("abstract spaces have no ambient points");
  double d = 0;
  for (int a = 0; a < dimension(); ++a) d = std::max(d, axes_[a].distance(p[a], q[a]));
  return d;
}

std::vector<Cell> GridSpace::adjacent(Cell c) const {
  check(c);
  if (!is_grid()) return (*adj_)[c];
  std::vector<Cell> out;
  auto ij = index(c);
  int dj = dimension() == 2 ? 1 : 0;
  for (int j = -dj; j <= dj; ++j) {
    for (int i = -1; i <= 1; ++i) {
      int a = ij[0] + i, b = ij[1] + j;
      if (!axes_[0].periodic && (a < 0 || a >= axes_[0].cells)) continue;
      if (dj && !axes_[1].periodic && (b < 0 || b >= axes_[1].cells)) continue;
      out.push_back(cell_at(a, b));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dchain
