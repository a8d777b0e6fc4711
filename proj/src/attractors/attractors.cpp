#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "dchain/attractors.hpp"
#include "dchain/errors.hpp"

namespace dchain {

namespace {

template <class Step>
Attractor greatest_fixed_point(const TrappingRegion& T, Step&& step, Relation rel, const GridSpace& X) {
  Attractor A;
  A.trapping = T;
  A.relation = rel;
  CellSet cur = T.U;
  while (true) {
    CellSet next = T.U & step(cur);
    ++A.iterations_to_fixpoint;
    if (next == cur) break;
    cur = std::move(next);
  }
  A.lambda = std::move(cur);
  A.boundary = boundary(X, A.lambda);
  return A;
}

}  // namespace

bool is_trapping(const CellMap& F, const CellSet& U) {
  if (U.universe() != F.cell_count()) throw ArgumentError("cell set does not belong to this map");
  return F.image(closure(F.space(), U)).is_subset_of(U);
}

TrappingRegion make_trapping_region(const CellMap& F, const CellSet& U) {
  if (!is_trapping(F, U)) throw ArgumentError("region is not trapping");
  return TrappingRegion{U};
}

Attractor attractor_from_trapping(const CellMap& F, const TrappingRegion& T) {
  if (!is_trapping(F, T.U)) throw ArgumentError("trapping certificate does not hold");
  return greatest_fixed_point(T, [&](const CellSet& S) { return F.image(S); }, Relation::cell_map, F.space());
}

Attractor attractor_from_trapping(const ChainGraph& g, const TrappingRegion& T) {
  if (!is_trapping(g.cell_map(), T.U)) throw ArgumentError("trapping certificate does not hold");
  return greatest_fixed_point(T, [&](const CellSet& S) { return g.step(S); }, Relation::chain_graph, g.space());
}

std::vector<double> default_delta_ladder(const GridSpace& space) {
  if (!space.is_grid()) return {0.5};
  std::vector<double> out;
  for (int k : {32, 24, 16, 12, 8, 6, 4, 3, 2, 1}) out.push_back(k * space.spacing());
  return out;
}

ChainStableAttractor attractor_from_chain_stable(const ChainGraph& g, const CellSet& S, double a,
                                                 std::vector<double> ladder) {
  const GridSpace& X = g.space();
  if (S.universe() != g.cell_count() || S.empty()) throw ArgumentError("S must be a nonempty cell set of the graph");
  if (!(a > 0)) throw ArgumentError("a must be positive");
  if (!S.is_subset_of(g.step(S))) throw ArgumentError("S is not invariant under the chain relation");
  const StabilityResult st = is_chain_stable(g, S, 0.0);
  if (!(st.escape_radius < a)) throw ArgumentError("S is not chain stable below the given radius");

  if (ladder.empty()) ladder = default_delta_ladder(X);
  std::sort(ladder.begin(), ladder.end(), std::greater<>());
  ladder.erase(std::remove_if(ladder.begin(), ladder.end(), [](double v) { return !(v > 0); }), ladder.end());
  if (ladder.empty()) throw ArgumentError("empty delta ladder");

  const CellSet target = closed_neighborhood(X, S, a);
  auto F = g.cell_map_ptr();
  std::vector<std::optional<CellSet>> forward(ladder.size());
  auto forward_set = [&](std::size_t i) -> const CellSet& {
    if (!forward[i]) forward[i] = S | forward_reach(build_chain_graph(F, ladder[i]), S);
    return *forward[i];
  };
  auto contained = [&](std::size_t i) { return forward_set(i).is_subset_of(target); };

  // Containment is monotone along the ladder; find its first index.
  std::size_t lo = 0, hi = ladder.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (contained(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  for (std::size_t i = lo; i < ladder.size(); ++i) {
    const CellSet& A = forward_set(i);
    const CellSet U = interior(X, A);
    if (!S.is_subset_of(U) || !is_trapping(*F, U)) continue;
    Attractor att = attractor_from_trapping(g, TrappingRegion{U});
    if (!S.is_subset_of(att.lambda) || !att.lambda.is_subset_of(target)) continue;
    return ChainStableAttractor{std::move(att), ladder[i], A};
  }
  throw ResolutionInsufficient("no delta on the ladder yields a trapping enclosure inside B_a(S)");
}

CellSet chain_forward_set(const ChainGraph& g, const CellSet& C) {
  if (C.empty()) throw ArgumentError("C must be nonempty");
  return forward_reach(g, C);
}

BoundaryConstruction attractor_with_C_in_boundary(const ChainGraph& g, const ChainDecomposition& d,
                                                  std::size_t component) {
  if (component >= d.size()) throw ArgumentError("component index out of range");
  const GridSpace& X = g.space();
  const CellSet& C = d.at(component);
  BoundaryConstruction out;
  const CellSet incoming = backward_reach(g, C) - C;
  if (incoming.empty()) {
    out.c_is_initial = true;
    return out;
  }
  const CellSet S = chain_forward_set(g, C) | C;
  double best = -1;
  (incoming - S).for_each([&](Cell y) {
    double dy = distance_to_set(X, y, S);
    if (dy > best) {
      best = dy;
      out.witness_y = y;
    }
  });
  if (best < 0) throw ResolutionInsufficient("no incoming cell outside the forward set");
  out.a = X.is_grid() ? best - X.cell_radius() - X.spacing() / 4 : best / 2;
  if (!(out.a > 0)) throw ResolutionInsufficient("incoming cells too close to the forward set");
  out.construction = attractor_from_chain_stable(g, S, out.a);
  const CellSet& lambda = out.construction->attractor.lambda;
  out.c_in_lambda = C.is_subset_of(lambda);
  out.chain_boundary = out.c_in_lambda && !(backward_reach(g, C) - lambda).empty();
  out.in_topological_boundary = (C & out.construction->attractor.boundary).count();
  return out;
}

BoundaryStabilityReport verify_boundary_chain_stable(const ChainGraph& g, const Attractor& A, double epsilon,
                                                     bool shadowing_certified) {
  BoundaryStabilityReport r;
  r.shadowing_certified = shadowing_certified;
  if (A.boundary.empty()) {
    r.vacuous = true;
    r.stable = true;
    return r;
  }
  StabilityResult s = is_chain_stable(g, A.boundary, epsilon);
  r.stable = s.stable;
  r.escape_radius = s.escape_radius;
  r.witness = std::move(s.witness);
  return r;
}

EscapeWitness escape_witness(const ChainGraph& g, const Attractor& A, Cell x) {
  const GridSpace& X = g.space();
  if (!closure(X, A.lambda).contains(x)) throw ArgumentError("x is not in the closure of the attractor");
  const std::size_t n = g.cell_count();
  constexpr Cell kNone = ~Cell{0};
  std::vector<Cell> toward(n, kNone);
  std::vector<bool> seen(n, false);
  std::deque<Cell> queue;
  EscapeWitness w;
  for (Cell p : g.predecessors(x)) {
    if (seen[p] || p == x) continue;
    seen[p] = true;
    toward[p] = x;
    queue.push_back(p);
  }
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    if (!A.lambda.contains(c)) {
      w.found = true;
      w.z = c;
      for (Cell t = c; t != kNone; t = t == x ? kNone : toward[t]) w.path.push_back(t);
      return w;
    }
    for (Cell p : g.predecessors(c))
      if (!seen[p] && p != x) {
        seen[p] = true;
        toward[p] = c;
        queue.push_back(p);
      }
  }
  auto pred = g.predecessors(x);
  if (!A.lambda.contains(x) && std::binary_search(pred.begin(), pred.end(), x)) {
    w.found = true;
    w.z = x;
    w.path = {x, x};
    return w;
  }
  for (Cell c : X.adjacent(x))
    if (!A.lambda.contains(c)) {
      w.found = true;
      w.via_adjacency = true;
      w.z = c;
      w.path = {c, x};
      return w;
    }
  return w;
}

TerminalReach reach_terminal(const ChainGraph& g, const ChainDecomposition& d, Cell x) {
  const std::size_t n = g.cell_count();
  if (x >= n) throw ArgumentError("cell index out of range");
  auto in_sink = [&](Cell c) {
    int k = d.component_of[c];
    return k >= 0 && d.is_sink[k];
  };
  constexpr Cell kNone = ~Cell{0};
  std::vector<Cell> parent(n, kNone);
  std::vector<bool> seen(n, false);
  std::deque<Cell> queue{x};
  seen[x] = true;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    if (in_sink(c)) {
      TerminalReach r;
      r.component = static_cast<std::size_t>(d.component_of[c]);
      r.y = c;
      for (Cell t = c; t != kNone; t = parent[t]) r.path.push_back(t);
      std::reverse(r.path.begin(), r.path.end());
      return r;
    }
    for (Cell t : g.successors(c))
      if (!seen[t]) {
        seen[t] = true;
        parent[t] = c;
        queue.push_back(t);
      }
  }
  throw ArgumentError("no sink component reachable; the graph is not total");
}

ThinTerminal terminal_with_empty_interior_near(const ChainGraph& g, const ChainDecomposition& d,
                                               std::size_t component, double a, bool shadowing_certified) {
  const GridSpace& X = g.space();
  if (component >= d.size()) throw ArgumentError("component index out of range");
  const CellSet& C = d.at(component);
  if (!X.is_grid()) throw ArgumentError("needs a connected grid space");
  if (!d.info[component].is_terminal) throw ArgumentError("component is not terminal");
  if (C.count() == X.cell_count()) throw ArgumentError("component is the whole space");
  if (!shadowing_certified) throw ArgumentError("shadowing not established near the component");

  ChainStableAttractor cons = attractor_from_chain_stable(g, C, a);
  Attractor thin = attractor_from_trapping(g.cell_map(), cons.attractor.trapping);
  const CellSet& B = thin.boundary;
  if (B.empty()) throw ResolutionInsufficient("constructed attractor has empty boundary");

  // Reachability inside B, by paths of length >= 1.
  const auto cells = B.to_vector();
  std::vector<CellSet> reach;
  for (Cell b : cells) {
    CellSet seen(X.cell_count());
    std::vector<Cell> stack;
    for (Cell t : g.successors(b))
      if (B.contains(t) && !seen.contains(t)) {
        seen.insert(t);
        stack.push_back(t);
      }
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      for (Cell t : g.successors(c))
        if (B.contains(t) && !seen.contains(t)) {
          seen.insert(t);
          stack.push_back(t);
        }
    }
    reach.push_back(std::move(seen));
  }
  const CellSet target = closed_neighborhood(X, C, a);
  CellSet done(X.cell_count());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (done.contains(cells[i]) || !reach[i].contains(cells[i])) continue;
    CellSet D(X.cell_count());
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (reach[i].contains(cells[j]) && reach[j].contains(cells[i])) D.insert(cells[j]);
    done |= D;
    if (!reach[i].is_subset_of(D)) continue;
    if (!interior(X, D).empty() || !D.is_subset_of(target)) continue;
    return ThinTerminal{D, cons.construction_delta, thin.lambda};
  }
  throw ResolutionInsufficient("no thin terminal component in the attractor boundary");
}

NeighborPair neighbors_of_nonclopen_bidirectional(const ChainGraph& g, const ChainDecomposition& d,
                                                  std::size_t component, double a) {
  if (component >= d.size()) throw ArgumentError("component index out of range");
  const auto& info = d.info[component];
  if (!info.is_initial || !info.is_terminal) throw ArgumentError("component is not both initial and terminal");
  const CellSet& C = d.at(component);
  if (is_clopen(g.space(), C)) throw ArgumentError("component is clopen");
  const CellSet N = closed_neighborhood(g.space(), C, a);
  std::optional<std::size_t> D, E;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j == component || !d.at(j).is_subset_of(N)) continue;
    if (!D && d.info[j].is_terminal) D = j;
    if (!E && d.info[j].is_initial) E = j;
  }
  if (!D || !E) throw ResolutionInsufficient("no terminal and initial neighbors inside B_a(C)");
  return {*D, *E};
}

namespace {

CellSet basin_unchecked(const CellMap& F, const CellSet& S, int horizon) {
  const GridSpace& X = F.space();
  const CellSet N = closed_neighborhood(X, S, 2 * X.cell_radius());
  CellSet out(X.cell_count());
  for (Cell c = 0; c < X.cell_count(); ++c) {
    CellSet cur(X.cell_count());
    cur.insert(c);
    bool inside = cur.is_subset_of(N);
    for (int t = 0; t < horizon; ++t) {
      CellSet next = F.image(cur);
      inside = next.is_subset_of(N);
      if (next == cur) break;
      cur = std::move(next);
    }
    if (inside) out.insert(c);
  }
  return out;
}

}  // namespace

CellSet basin(const CellMap& F, const CellSet& S, int horizon) {
  const GridSpace& X = F.space();
  if (horizon < 1) throw ArgumentError("horizon must be positive");
  if (!F.image(S).is_subset_of(closed_neighborhood(X, S, 2 * X.cell_radius())))
    throw ArgumentError("S is not forward invariant up to fattening");
  return basin_unchecked(F, S, horizon);
}

bool basin_boundary_inclusion(const CellMap& F, const CellSet& S, int horizon) {
  const GridSpace& X = F.space();
  const CellSet lhs = basin(F, S, horizon) - S;
  const CellSet B = boundary(X, S);
  if (B.empty()) return lhs.empty();
  return lhs.is_subset_of(closed_neighborhood(X, basin_unchecked(F, B, horizon), X.spacing()));
}

CellSet USpec::realize(const GridSpace& space) const {
  CellSet U(space.cell_count());
  switch (kind) {
    case Kind::all: return CellSet::full(space.cell_count());
    case Kind::arc: {
      if (!space.is_grid() || space.dimension() != 1) throw ConfigError("arc regions need a one-dimensional grid");
      const double L = space.axes()[0].length;
      const bool periodic = space.axes()[0].periodic;
      if (!(hi > lo)) throw ConfigError("arc needs lo < hi");
      for (Cell c = 0; c < space.cell_count(); ++c) {
        const double x = space.center(c)[0];
        bool in;
        if (periodic) {
          if (hi - lo >= L) {
            in = true;
          } else {
            double t = std::fmod(x - lo, L);
            if (t < 0) t += L;
            in = t > 0 && t < hi - lo;
          }
        } else {
          in = x > lo && x < hi;
        }
        if (in) U.insert(c);
      }
      return U;
    }
    case Kind::ball:
      if (!space.is_grid() || center.size() != space.dimension()) throw ConfigError("ball center dimension mismatch");
      for (Cell c = 0; c < space.cell_count(); ++c)
        if (space.point_distance(space.center(c), center) < radius) U.insert(c);
      return U;
    case Kind::cells:
      for (Cell c : cells) {
        if (c >= space.cell_count()) throw ConfigError("cell index out of range in region");
        U.insert(c);
      }
      return U;
  }
  return U;
}

std::shared_ptr<const GridSpace> grid_for(const PointMap& f, int resolution) {
  switch (f.domain) {
    case Domain::circle: return std::make_shared<const GridSpace>(GridSpace::circle(resolution));
    case Domain::torus2: return std::make_shared<const GridSpace>(GridSpace::torus2(resolution));
    case Domain::interval: return std::make_shared<const GridSpace>(GridSpace::interval(resolution));
  }
  throw ArgumentError("unknown domain");
}

BoundaryStudy boundary_refinement_study(const PointMap& f, const USpec& Uspec, const std::vector<int>& resolutions,
                                        int iterations) {
  BoundaryStudy study;
  for (int n : resolutions) {
    auto X = grid_for(f, n);
    CellMap F = build_cell_map(f, X);
    BoundaryStudyLevel lvl;
    lvl.resolution = n;
    const CellSet U = Uspec.realize(*X);
    lvl.trapping = is_trapping(F, U);
    if (!lvl.trapping) {
      study.levels.push_back(lvl);
      continue;
    }
    const Attractor A = attractor_from_trapping(F, TrappingRegion{U});
    lvl.boundary_components = connected_components(*X, A.boundary).size();
    const Topology tu = topology(*X, U);
    CellSet S = F.image(tu.boundary);
    lvl.ring_hypothesis = S.is_subset_of(tu.closure - A.lambda);
    const double diam = 2 * X->cell_radius();
    if (A.boundary.empty() || S.empty()) {
      lvl.band_ok = A.boundary.empty();
    } else {
      for (int i = 0; i < iterations; ++i) {
        S = F.image(S);
        lvl.hausdorff.push_back(hausdorff_distance(*X, S, A.boundary));
      }
      const double tol = X->tolerance();
      for (int i = 0; i < iterations; ++i)
        if (lvl.hausdorff[i] < 2 * diam - tol) {
          lvl.band_entry = i + 1;
          break;
        }
      if (lvl.band_entry > 0) {
        auto first = lvl.hausdorff.begin() + (lvl.band_entry - 1);
        const double hi = *std::max_element(first, lvl.hausdorff.end());
        const double lo = *std::min_element(first, lvl.hausdorff.end());
        lvl.band_ok = hi < 2 * diam - tol && hi - lo <= diam + tol;
      }
    }
    study.levels.push_back(std::move(lvl));
  }
  if (study.levels.size() >= 2) {
    const auto& a = study.levels[study.levels.size() - 2];
    const auto& b = study.levels.back();
    study.count_stable = a.trapping && b.trapping && a.boundary_components == b.boundary_components;
  }
  return study;
}

}  // namespace dchain
