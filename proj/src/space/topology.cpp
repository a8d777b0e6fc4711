#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "dchain/errors.hpp"
#include "dchain/space.hpp"

namespace dchain {

namespace {

void check_universe(const GridSpace& space, const CellSet& S) {
  if (S.universe() != space.cell_count()) throw ArgumentError("cell set does not belong to this space");
}

// One-dimensional dilation of every line along axis `a`.
CellSet dilate_axis(const GridSpace& space, const CellSet& S, int a, int k) {
  if (k <= 0) return S;
  const auto& axes = space.axes();
  const int n = axes[a].cells;
  const bool periodic = axes[a].periodic;
  const int other = space.dimension() == 2 ? axes[1 - a].cells : 1;
  const int stride = a == 0 ? 1 : axes[0].cells;
  CellSet out(space.cell_count());
  std::vector<int> prefix(2 * n + 1);
  for (int line = 0; line < other; ++line) {
    const int base = a == 0 ? line * axes[0].cells : line;
    auto at = [&](int i) { return static_cast<Cell>(base + i * stride); };
    bool any = false;
    prefix[0] = 0;
    for (int i = 0; i < 2 * n; ++i) {
      int in = S.contains(at(i % n)) ? 1 : 0;
      any |= in;
      prefix[i + 1] = prefix[i] + in;
    }
    if (!any) continue;
    if (periodic && 2 * k + 1 >= n) {
      for (int i = 0; i < n; ++i) out.insert(at(i));
      continue;
    }
    for (int i = 0; i < n; ++i) {
      int lo = i - k, hi = i + k;
      int hits;
      if (periodic) {
        if (lo < 0) {
          lo += n;
          hi += n;
        }
        hits = prefix[hi + 1] - prefix[lo];
      } else {
        lo = std::max(lo, 0);
        hi = std::min(hi, n - 1);
        hits = prefix[hi + 1] - prefix[lo];
      }
      if (hits) out.insert(at(i));
    }
  }
  return out;
}

}  // namespace

CellSet dilate_cells(const GridSpace& space, const CellSet& S, const std::array<int, 2>& radius) {
  check_universe(space, S);
  if (!space.is_grid()) throw ArgumentError("box dilation needs a grid space");
  CellSet out = dilate_axis(space, S, 0, radius[0]);
  if (space.dimension() == 2) out = dilate_axis(space, out, 1, radius[1]);
  return out;
}

CellSet closed_neighborhood(const GridSpace& space, const CellSet& S, double r) {
  check_universe(space, S);
  if (!(r >= 0)) throw ArgumentError("neighborhood radius must be nonnegative");
  if (!space.is_grid()) {
    CellSet out(space.cell_count());
    const auto& d = space.distances();
    const double lim = r + space.tolerance();
    S.for_each([&](Cell s) {
      for (Cell c = 0; c < space.cell_count(); ++c)
        if (d(s, c) <= lim) out.insert(c);
    });
    return out;
  }
  std::array<int, 2> k{0, 0};
  const double reach = r + space.cell_radius();
  for (int a = 0; a < space.dimension(); ++a) {
    const Axis& ax = space.axes()[a];
    double kk = std::floor(reach / ax.spacing() + space.tolerance() / ax.spacing());
    k[a] = static_cast<int>(std::min<double>(kk, ax.cells));
  }
  return dilate_cells(space, S, k);
}

CellSet closure(const GridSpace& space, const CellSet& S) {
  check_universe(space, S);
  if (space.is_grid()) return dilate_cells(space, S, {1, 1});
  CellSet out(space.cell_count());
  S.for_each([&](Cell c) {
    for (Cell a : space.adjacent(c)) out.insert(a);
  });
  return out;
}

CellSet interior(const GridSpace& space, const CellSet& S) {
  return closure(space, S.complement()).complement();
}

CellSet boundary(const GridSpace& space, const CellSet& S) {
  return closure(space, S) - interior(space, S);
}

Topology topology(const GridSpace& space, const CellSet& S) {
  Topology t{closure(space, S), interior(space, S), CellSet(space.cell_count())};
  t.boundary = t.closure - t.interior;
  return t;
}

bool is_clopen(const GridSpace& space, const CellSet& S) { return boundary(space, S).empty(); }

std::vector<CellSet> connected_components(const GridSpace& space, const CellSet& S) {
  check_universe(space, S);
  std::vector<CellSet> comps;
  CellSet seen(space.cell_count());
  std::deque<Cell> queue;
  S.for_each([&](Cell start) {
    if (seen.contains(start)) return;
    CellSet comp(space.cell_count());
    seen.insert(start);
    queue.push_back(start);
    while (!queue.empty()) {
      Cell c = queue.front();
      queue.pop_front();
      comp.insert(c);
      for (Cell a : space.adjacent(c))
        if (S.contains(a) && !seen.contains(a)) {
          seen.insert(a);
          queue.push_back(a);
        }
    }
    comps.push_back(std::move(comp));
  });
  return comps;
}

double distance_to_set(const GridSpace& space, Cell c, const CellSet& S) {
  check_universe(space, S);
  double best = std::numeric_limits<double>::infinity();
  S.for_each([&](Cell s) { best = std::min(best, space.metric(c, s)); });
  return best;
}

double set_distance(const GridSpace& space, const CellSet& A, const CellSet& B) {
  double best = std::numeric_limits<double>::infinity();
  A.for_each([&](Cell a) { best = std::min(best, distance_to_set(space, a, B)); });
  return best;
}

double hausdorff_distance(const GridSpace& space, const CellSet& A, const CellSet& B) {
  check_universe(space, A);
  check_universe(space, B);
  if (A.empty() || B.empty()) throw ArgumentError("Hausdorff distance needs nonempty sets");
  double h = 0;
  auto directed = [&](const CellSet& X, const CellSet& Y) {
    X.for_each([&](Cell x) {
      if (!Y.contains(x)) h = std::max(h, distance_to_set(space, x, Y));
    });
  };
  directed(A, B);
  directed(B, A);
  return h;
}

}  // namespace dchain
