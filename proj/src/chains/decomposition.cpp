#include <algorithm>
#include <deque>
#include <numeric>

#include "dchain/chains.hpp"
#include "dchain/errors.hpp"

namespace dchain {

namespace {

bool has_self_loop(const ChainGraph& g, Cell c) {
  auto s = g.successors(c);
  return std::binary_search(s.begin(), s.end(), c);
}

// A lone cell is recurrent only if its loop can be a point-level δ-chain: when
// every point of the cell moves by more than δ in a fixed coordinate direction,
// no chain can return.
bool recurrent_loop(const ChainGraph& g, Cell c) {
  return has_self_loop(g, c) && g.cell_map().displacement_floor(c) <= g.delta();
}

double sup_distance(const GridSpace& space, const CellSet& R, const CellSet& S) {
  double r = 0;
  (R - S).for_each([&](Cell c) { r = std::max(r, distance_to_set(space, c, S)); });
  return r;
}

}  // namespace

CellSet chain_recurrent_set(const ChainGraph& g) {
  int count = 0;
  auto comp = strongly_connected(g, &count);
  std::vector<int> size(count, 0);
  for (int c : comp) ++size[c];
  CellSet cr(g.cell_count());
  for (Cell c = 0; c < g.cell_count(); ++c)
    if (size[comp[c]] > 1 || recurrent_loop(g, c)) cr.insert(c);
  return cr;
}

ChainDecomposition chain_components(const ChainGraph& g) {
  const std::size_t n = g.cell_count();
  int count = 0;
  auto scc = strongly_connected(g, &count);
  std::vector<int> size(count, 0);
  std::vector<bool> recurrent_scc(count, false);
  for (Cell c = 0; c < n; ++c) {
    ++size[scc[c]];
    if (recurrent_loop(g, c)) recurrent_scc[scc[c]] = true;
  }
  for (int s = 0; s < count; ++s)
    if (size[s] > 1) recurrent_scc[s] = true;

  ChainDecomposition d;
  d.recurrent = CellSet(n);
  d.component_of.assign(n, -1);
  d.node_of.assign(n, -1);
  std::vector<int> comp_index(count, -1);
  for (Cell c = 0; c < n; ++c) {
    const int s = scc[c];
    if (!recurrent_scc[s]) continue;
    if (comp_index[s] < 0) {
      comp_index[s] = static_cast<int>(d.components.size());
      d.components.emplace_back(n);
    }
    d.components[comp_index[s]].insert(c);
    d.component_of[c] = comp_index[s];
    d.node_of[c] = comp_index[s];
    d.recurrent.insert(c);
  }
  int node = static_cast<int>(d.components.size());
  for (Cell c = 0; c < n; ++c)
    if (d.node_of[c] < 0) d.node_of[c] = node++;
  d.condensation.assign(node, {});
  std::vector<bool> has_in(node, false);
  for (Cell c = 0; c < n; ++c)
    for (Cell t : g.successors(c)) {
      const int a = d.node_of[c], b = d.node_of[t];
      if (a != b) {
        d.condensation[a].push_back(b);
        has_in[b] = true;
      }
    }
  for (auto& row : d.condensation) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    d.is_sink.push_back(d.condensation[i].empty());
    d.is_source.push_back(!has_in[i]);
  }
  return classify_components(g, std::move(d), 0.0);
}

ChainDecomposition classify_components(const ChainGraph& g, ChainDecomposition d, double epsilon) {
  if (!(epsilon >= 0)) throw ArgumentError("epsilon must be nonnegative");
  const GridSpace& X = g.space();
  const ChainGraph rev = g.reversed();
  d.epsilon = epsilon;
  d.info.assign(d.components.size(), {});
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    const CellSet& C = d.components[i];
    const CellSet others = d.recurrent - C;
    const CellSet nbhd = closed_neighborhood(X, C, epsilon);
    auto& info = d.info[i];
    const CellSet fwd = forward_reach(g, C);
    info.is_terminal = !fwd.intersects(others) && fwd.is_subset_of(nbhd);
    info.escape_radius = sup_distance(X, fwd, C);
    const CellSet bwd = forward_reach(rev, C);
    info.is_initial = !bwd.intersects(others) && bwd.is_subset_of(nbhd);
    info.reverse_escape_radius = sup_distance(X, bwd, C);
  }
  return d;
}

StabilityResult is_chain_stable(const ChainGraph& g, const CellSet& S, double epsilon) {
  if (S.empty()) throw ArgumentError("chain stability needs a nonempty set");
  if (!(epsilon >= 0)) throw ArgumentError("epsilon must be nonnegative");
  const CellSet R = forward_reach(g, S);
  const CellSet nbhd = closed_neighborhood(g.space(), S, epsilon);
  StabilityResult res;
  res.stable = R.is_subset_of(nbhd);
  res.escape_radius = sup_distance(g.space(), R, S);
  if (!res.stable) res.witness = chain_path(g, S, nbhd.complement());
  return res;
}

bool is_chain_transitive(const ChainGraph& g) {
  int count = 0;
  strongly_connected(g, &count);
  if (count != 1) return false;
  return g.cell_count() > 1 || has_self_loop(g, 0);
}

long chain_period(const ChainGraph& g) {
  if (!is_chain_transitive(g)) return 0;
  const std::size_t n = g.cell_count();
  std::vector<long> level(n, -1);
  std::deque<Cell> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    for (Cell t : g.successors(c))
      if (level[t] < 0) {
        level[t] = level[c] + 1;
        queue.push_back(t);
      }
  }
  long p = 0;
  for (Cell c = 0; c < n; ++c)
    for (Cell t : g.successors(c)) p = std::gcd(p, std::abs(level[c] + 1 - level[t]));
  return p;
}

bool is_chain_mixing(const ChainGraph& g) { return chain_period(g) == 1; }

Eigen::MatrixXd component_separation(const GridSpace& space, const ChainDecomposition& d) {
  if (d.components.empty()) throw ArgumentError("no components");
  const auto k = static_cast<Eigen::Index>(d.components.size());
  if (k == 1) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) m(i, j) = m(j, i) = set_distance(space, d.components[i], d.components[j]);
  return m;
}

bool clopen_in_CR(const ChainGraph& g, const ChainDecomposition& d, std::size_t component) {
  if (component >= d.components.size()) throw ArgumentError("component index out of range");
  const CellSet& C = d.components[component];
  return !closure(g.space(), C).intersects(d.recurrent - C);
}

MinimalitySeparationReport minimality_and_separation_checks(const ChainGraph& g, const ChainDecomposition& d,
                                                            int samples, int horizon) {
  const GridSpace& X = g.space();
  const CellMap& F = g.cell_map();
  MinimalitySeparationReport rep;
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    const CellSet& C = d.components[i];
    MinimalityCheck m;
    m.component = i;
    m.applicable = !interior(X, C).empty() && d.info[i].is_initial && d.info[i].is_terminal && clopen_in_CR(g, d, i);
    if (m.applicable) m.passed = is_clopen(X, C);
    rep.passed = rep.passed && m.passed;
    rep.minimality.push_back(m);
  }
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    if (!d.info[i].is_initial) continue;
    const CellSet& C = d.components[i];
    const auto outside = C.complement().to_vector();
    SeparationCheck s;
    s.component = i;
    s.min_distance = std::numeric_limits<double>::infinity();
    if (!outside.empty()) {
      const std::size_t stride = std::max<std::size_t>(1, outside.size() / static_cast<std::size_t>(samples));
      for (std::size_t k = 0; k < outside.size(); k += stride) {
        CellSet cur(X.cell_count());
        cur.insert(outside[k]);
        ++s.samples;
        for (int t = 0; t < horizon; ++t) {
          CellSet next = F.image(cur);
          s.min_distance = std::min(s.min_distance, set_distance(X, next, C));
          if (next == cur) break;
          cur = std::move(next);
        }
      }
    }
    s.passed = s.min_distance > 0;
    rep.passed = rep.passed && s.passed;
    rep.separation.push_back(s);
  }
  return rep;
}

}  // namespace dchain
