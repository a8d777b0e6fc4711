#include <algorithm>
#include <cmath>

#include "dchain/errors.hpp"
#include "dchain/parallel.hpp"
#include "dchain/systems.hpp"

namespace dchain {

CellMap::CellMap(std::shared_ptr<const GridSpace> space, std::vector<std::vector<Cell>> images)
    : space_(std::move(space)) {
  const std::size_t n = space_->cell_count();
  if (images.size() != n) throw ArgumentError("one image list per cell required");
  fwd_offsets_.assign(n + 1, 0);
  std::vector<std::size_t> indeg(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) {
    auto& row = images[c];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    if (row.empty()) throw ArgumentError("every cell needs a nonempty image");
    for (Cell t : row) {
      if (t >= n) throw ArgumentError("image cell out of range");
      ++indeg[t + 1];
    }
    fwd_offsets_[c + 1] = fwd_offsets_[c] + row.size();
  }
  fwd_.reserve(fwd_offsets_[n]);
  for (auto& row : images) fwd_.insert(fwd_.end(), row.begin(), row.end());
  inv_offsets_.assign(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) inv_offsets_[c + 1] = inv_offsets_[c] + indeg[c + 1];
  inv_.resize(fwd_.size());
  std::vector<std::size_t> fill(inv_offsets_.begin(), inv_offsets_.end() - 1);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t e = fwd_offsets_[c]; e < fwd_offsets_[c + 1]; ++e) inv_[fill[fwd_[e]]++] = static_cast<Cell>(c);
}

std::span<const Cell> CellMap::forward(Cell c) const {
  if (c >= cell_count()) throw ArgumentError("cell index out of range");
  return {fwd_.data() + fwd_offsets_[c], fwd_offsets_[c + 1] - fwd_offsets_[c]};
}

std::span<const Cell> CellMap::inverse(Cell c) const {
  if (c >= cell_count()) throw ArgumentError("cell index out of range");
  return {inv_.data() + inv_offsets_[c], inv_offsets_[c + 1] - inv_offsets_[c]};
}

CellSet CellMap::forward_set(Cell c) const {
  CellSet s(cell_count());
  for (Cell t : forward(c)) s.insert(t);
  return s;
}

CellSet CellMap::inverse_set(Cell c) const {
  CellSet s(cell_count());
  for (Cell t : inverse(c)) s.insert(t);
  return s;
}

CellSet CellMap::image(const CellSet& S) const {
  CellSet out(cell_count());
  S.for_each([&](Cell c) {
    for (Cell t : forward(c)) out.insert(t);
  });
  return out;
}

CellSet CellMap::preimage(const CellSet& S) const {
  CellSet out(cell_count());
  S.for_each([&](Cell c) {
    for (Cell t : inverse(c)) out.insert(t);
  });
  return out;
}

Cell center_image_cell(const PointMap& f, const GridSpace& space, Cell c) {
  return space.cell_of(f.forward(space.center(c)));
}

// Only the center is evaluated: the fattening radius L*r + h/2 already covers
// the images of every point of the closed cell, corners included.
CellMap build_cell_map(const PointMap& f, std::shared_ptr<const GridSpace> space) {
  if (!f.compatible(*space)) throw ArgumentError(f.name + ": grid does not match the map's domain");
  const GridSpace& X = *space;
  const std::size_t n = X.cell_count();
  const double cr = X.cell_radius();
  const double tol = X.tolerance();
  std::vector<std::vector<Cell>> images(n);
  std::vector<double> floor(n, 0.0);
  parallel_for(n, [&](std::size_t ci) {
    const Cell c = static_cast<Cell>(ci);
    const Point p = X.center(c);
    const Point y = f.wrap(f.forward(p));
    const double L = f.local_lipschitz ? f.local_lipschitz(p, cr) : f.lipschitz_bound;
    const double Ld = f.displacement_lipschitz ? f.displacement_lipschitz(p, cr) : L + 1;
    for (int a = 0; a < X.dimension(); ++a) {
      const Axis& ax = X.axes()[a];
      double disp = y[a] - p[a];
      if (ax.periodic) disp -= ax.length * std::round(disp / ax.length);
      floor[ci] = std::max(floor[ci], std::abs(disp) - Ld * cr - tol);
    }
    std::array<std::vector<int>, 2> ranges;
    for (int a = 0; a < X.dimension(); ++a) {
      const Axis& ax = X.axes()[a];
      const double h = ax.spacing();
      const double R = L * cr + h / 2;
      long lo = static_cast<long>(std::ceil((y[a] - R - tol) / h));
      long hi = static_cast<long>(std::floor((y[a] + R + tol) / h));
      if (ax.periodic) {
        if (hi - lo + 1 >= ax.cells) {
          lo = 0;
          hi = ax.cells - 1;
        }
        for (long k = lo; k <= hi; ++k) ranges[a].push_back(static_cast<int>(((k % ax.cells) + ax.cells) % ax.cells));
      } else {
        lo = std::max(lo, 0L);
        hi = std::min(hi, static_cast<long>(ax.cells - 1));
        for (long k = lo; k <= hi; ++k) ranges[a].push_back(static_cast<int>(k));
      }
    }
    if (X.dimension() == 1) ranges[1] = {0};
    auto& row = images[ci];
    for (int j : ranges[1])
      for (int i : ranges[0]) row.push_back(X.cell_at(i, j));
  });
  CellMap F(std::move(space), std::move(images));
  F.set_lipschitz_bound(f.lipschitz_bound);
  F.set_displacement_floor(std::move(floor));
  return F;
}

CellMap build_cell_map(const PointMap& f, const GridSpace& space) {
  return build_cell_map(f, std::make_shared<const GridSpace>(space));
}

CellSet omega_limit(const CellMap& F, Cell c, int burn_in, int horizon) {
  if (burn_in < 1 || horizon < 1) throw ArgumentError("burn_in and horizon must be positive");
  CellSet current = F.forward_set(c);
  long step = 1;
  auto advance_to = [&](long target) {
    while (step < target) {
      current = F.image(current);
      ++step;
    }
  };
  auto window = [&]() {
    CellSet u = current;
    for (int t = 0; t < horizon; ++t) {
      current = F.image(current);
      ++step;
      u |= current;
    }
    return u;
  };
  advance_to(burn_in);
  CellSet acc = window();
  for (long b = 2L * burn_in; b <= 64L * burn_in; b *= 2) {
    advance_to(b);
    CellSet next = acc & window();
    if (next == acc) break;
    acc = std::move(next);
  }
  return acc;
}

}  // namespace dchain
