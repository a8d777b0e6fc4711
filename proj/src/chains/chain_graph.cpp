#include <algorithm>
#include <cmath>
#include <deque>

#include "dchain/chains.hpp"
#include "dchain/errors.hpp"
#include "dchain/parallel.hpp"

namespace dchain {

Csr Csr::from_rows(std::vector<std::vector<Cell>>& rows) {
  Csr out;
  out.offsets.assign(rows.size() + 1, 0);
  for (std::size_t c = 0; c < rows.size(); ++c) out.offsets[c + 1] = out.offsets[c] + rows[c].size();
  out.targets.reserve(out.offsets.back());
  for (auto& r : rows) {
    out.targets.insert(out.targets.end(), r.begin(), r.end());
    std::vector<Cell>().swap(r);
  }
  return out;
}

Csr Csr::transposed(std::size_t n) const {
  Csr t;
  t.offsets.assign(n + 1, 0);
  for (Cell v : targets) ++t.offsets[v + 1];
  for (std::size_t c = 0; c < n; ++c) t.offsets[c + 1] += t.offsets[c];
  t.targets.resize(targets.size());
  std::vector<std::size_t> fill(t.offsets.begin(), t.offsets.end() - 1);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t e = offsets[c]; e < offsets[c + 1]; ++e) t.targets[fill[targets[e]]++] = static_cast<Cell>(c);
  return t;
}

ChainGraph::ChainGraph(std::shared_ptr<const CellMap> F, double delta, std::shared_ptr<const Csr> succ,
                       std::shared_ptr<const Csr> pred, bool reversed)
    : F_(std::move(F)), delta_(delta), succ_(std::move(succ)), pred_(std::move(pred)), reversed_(reversed) {}

double ChainGraph::soundness_bound() const {
  return delta_ + 2 * space().cell_radius() * (1 + F_->lipschitz_bound());
}

std::span<const Cell> ChainGraph::successors(Cell c) const {
  if (c >= cell_count()) throw ArgumentError("cell index out of range");
  return succ_->row(c);
}

std::span<const Cell> ChainGraph::predecessors(Cell c) const {
  if (c >= cell_count()) throw ArgumentError("cell index out of range");
  return pred_->row(c);
}

CellSet ChainGraph::successor_set(Cell c) const {
  CellSet s(cell_count());
  for (Cell t : successors(c)) s.insert(t);
  return s;
}

CellSet ChainGraph::step(const CellSet& S) const {
  CellSet out(cell_count());
  S.for_each([&](Cell c) {
    for (Cell t : succ_->row(c)) out.insert(t);
  });
  return out;
}

ChainGraph ChainGraph::reversed() const { return ChainGraph(F_, delta_, pred_, succ_, !reversed_); }

ChainGraph build_chain_graph(std::shared_ptr<const CellMap> F, double delta) {
  if (!(delta > 0)) throw ArgumentError("delta must be positive");
  const GridSpace& X = F->space();
  const std::size_t n = X.cell_count();
  std::vector<std::vector<Cell>> rows(n);
  if (X.is_grid()) {
    std::array<int, 2> k{0, 0};
    for (int a = 0; a < X.dimension(); ++a) {
      const Axis& ax = X.axes()[a];
      double kk = std::floor((delta + X.cell_radius() + X.tolerance()) / ax.spacing());
      k[a] = static_cast<int>(std::min<double>(kk, ax.cells));
    }
    parallel_for(n, [&](std::size_t ci) {
      auto& row = rows[ci];
      for (Cell t : F->forward(static_cast<Cell>(ci))) {
        auto ij = X.index(t);
        const int kj = X.dimension() == 2 ? k[1] : 0;
        for (int dj = -kj; dj <= kj; ++dj) {
          int j = ij[1] + dj;
          if (X.dimension() == 2 && !X.axes()[1].periodic && (j < 0 || j >= X.axes()[1].cells)) continue;
          for (int di = -k[0]; di <= k[0]; ++di) {
            int i = ij[0] + di;
            if (!X.axes()[0].periodic && (i < 0 || i >= X.axes()[0].cells)) continue;
            row.push_back(X.cell_at(i, j));
          }
        }
      }
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    });
  } else {
    const auto& d = X.distances();
    const double lim = delta + X.tolerance();
    parallel_for(n, [&](std::size_t ci) {
      auto& row = rows[ci];
      for (Cell c2 = 0; c2 < n; ++c2)
        for (Cell t : F->forward(static_cast<Cell>(ci)))
          if (d(t, c2) <= lim) {
            row.push_back(c2);
            break;
          }
    });
  }
  auto succ = std::make_shared<Csr>(Csr::from_rows(rows));
  auto pred = std::make_shared<const Csr>(succ->transposed(n));
  return ChainGraph(std::move(F), delta, std::move(succ), std::move(pred));
}

ChainGraph build_chain_graph(const CellMap& F, double delta) {
  return build_chain_graph(std::make_shared<const CellMap>(F), delta);
}

namespace {

CellSet reach(const ChainGraph& g, const CellSet& S, bool forward) {
  if (S.universe() != g.cell_count()) throw ArgumentError("cell set does not belong to this graph");
  CellSet seen(g.cell_count());
  std::vector<Cell> stack;
  auto push_next = [&](Cell c) {
    for (Cell t : forward ? g.successors(c) : g.predecessors(c))
      if (!seen.contains(t)) {
        seen.insert(t);
        stack.push_back(t);
      }
  };
  S.for_each(push_next);
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    push_next(c);
  }
  return seen;
}

}  // namespace

CellSet forward_reach(const ChainGraph& g, const CellSet& S) { return reach(g, S, true); }
CellSet backward_reach(const ChainGraph& g, const CellSet& S) { return reach(g, S, false); }

bool chain_reaches(const ChainGraph& g, Cell a, Cell b) {
  CellSet s(g.cell_count());
  s.insert(a);
  if (b >= g.cell_count()) throw ArgumentError("cell index out of range");
  return forward_reach(g, s).contains(b);
}

std::vector<Cell> chain_path(const ChainGraph& g, const CellSet& from, const CellSet& to) {
  const std::size_t n = g.cell_count();
  constexpr Cell kNone = ~Cell{0};
  std::vector<Cell> parent(n, kNone);
  std::vector<bool> seen(n, false);
  std::deque<Cell> queue;
  Cell hit = kNone;
  // Sources are expanded first so that a path of length >= 1 is found even
  // when `to` meets `from`.
  from.for_each([&](Cell s) {
    if (hit != kNone) return;
    for (Cell t : g.successors(s)) {
      if (seen[t]) continue;
      seen[t] = true;
      parent[t] = s;
      if (to.contains(t)) {
        hit = t;
        return;
      }
      queue.push_back(t);
    }
  });
  while (hit == kNone && !queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    for (Cell t : g.successors(c)) {
      if (seen[t]) continue;
      seen[t] = true;
      parent[t] = c;
      if (to.contains(t)) {
        hit = t;
        break;
      }
      queue.push_back(t);
    }
  }
  if (hit == kNone) return {};
  std::vector<Cell> path{hit};
  for (Cell c = parent[hit];; c = parent[c]) {
    path.push_back(c);
    if (from.contains(c)) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> strongly_connected(const ChainGraph& g, int* count) {
  const std::size_t n = g.cell_count();
  constexpr int kUnvisited = -1;
  std::vector<int> index(n, kUnvisited), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<Cell> stack;
  struct Frame {
    Cell v;
    std::size_t edge;
  };
  std::vector<Frame> call;
  int next_index = 0, next_comp = 0;
  for (Cell root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& fr = call.back();
      auto succ = g.successors(fr.v);
      if (fr.edge < succ.size()) {
        Cell w = succ[fr.edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      const Cell v = fr.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        Cell w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

}  // namespace dchain
