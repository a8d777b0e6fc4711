#include "dchain/harness/oracle.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <sstream>

#include "dchain/errors.hpp"
#include "dchain/rng.hpp"

namespace dchain::harness {

namespace {

Mask bit(int i) { return Mask{1} << i; }

Mask to_mask(const CellSet& s) {
  Mask m = 0;
  s.for_each([&](Cell c) { m |= bit(static_cast<int>(c)); });
  return m;
}

void check_size(int n) {
  if (n < 1 || n > 16) throw ArgumentError("oracle digraphs need 1..16 nodes");
}

}  // namespace

std::string mask_string(Mask m, int n) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < n; ++i)
    if (m & bit(i)) {
      s += (first ? "" : ",") + std::to_string(i);
      first = false;
    }
  return s + "}";
}

void OracleResult::merge(const OracleResult& o) {
  queries += o.queries;
  mismatches.insert(mismatches.end(), o.mismatches.begin(), o.mismatches.end());
}

Digraph random_digraph(int n, double density, std::uint64_t seed) {
  check_size(n);
  Rng rng(seed);
  Digraph g{n, std::vector<Mask>(n, 0), {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < density) g.succ[i] |= bit(j);
    if (!g.succ[i]) g.succ[i] = bit(static_cast<int>(rng.below(n)));
  }
  return g;
}

Digraph random_permutation(int n, std::uint64_t seed) {
  check_size(n);
  Rng rng(seed);
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
  Digraph g{n, std::vector<Mask>(n, 0), {}};
  for (int i = 0; i < n; ++i) g.succ[i] = bit(p[i]);
  return g;
}

Digraph random_topological_digraph(int n, double density, std::uint64_t seed, bool close_targets) {
  Digraph g = random_digraph(n, density, seed);
  Rng rng(mix_seed(seed, 1));
  g.adjacency.assign(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < 0.2) {
        g.adjacency[i] |= bit(j);
        g.adjacency[j] |= bit(i);
      }
  if (close_targets)
    for (int i = 0; i < n; ++i) {
      Mask extra = 0;
      for (int t = 0; t < n; ++t)
        if (g.succ[i] & bit(t)) extra |= g.adjacency[t];
      g.succ[i] |= extra;
    }
  return g;
}

GridSpace engine_space(const Digraph& g) {
  if (g.adjacency.empty()) return GridSpace::discrete(g.n);
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(g.n, g.n, g.n);
  std::vector<std::vector<Cell>> adj(g.n);
  for (int s = 0; s < g.n; ++s) {
    for (int t = 0; t < g.n; ++t)
      if (g.adjacency[s] & bit(t)) adj[s].push_back(static_cast<Cell>(t));
    std::vector<int> hop(g.n, -1);
    std::deque<int> q{s};
    hop[s] = 0;
    while (!q.empty()) {
      int c = q.front();
      q.pop_front();
      dist(s, c) = hop[c];
      for (int t = 0; t < g.n; ++t)
        if ((g.adjacency[c] & bit(t)) && hop[t] < 0) {
          hop[t] = hop[c] + 1;
          q.push_back(t);
        }
    }
  }
  return GridSpace::abstract(std::move(dist), std::move(adj));
}

ChainGraph engine_graph(const Digraph& g) {
  auto space = std::make_shared<const GridSpace>(engine_space(g));
  std::vector<std::vector<Cell>> images(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.succ[i] & bit(j)) images[i].push_back(static_cast<Cell>(j));
  // Distinct cells are at distance >= 1, so a half-unit delta adds no edges.
  return build_chain_graph(std::make_shared<const CellMap>(space, std::move(images)), 0.5);
}

BruteForce brute_force(const Digraph& g) {
  const int n = g.n;
  BruteForce b;
  b.reach = g.succ;
  for (int k = 0; k < n; ++k)
    for (int v = 0; v < n; ++v)
      if (b.reach[v] & bit(k)) b.reach[v] |= b.reach[k];
  for (int v = 0; v < n; ++v)
    if (b.reach[v] & bit(v)) b.recurrent |= bit(v);
  Mask done = 0;
  for (int v = 0; v < n; ++v) {
    if (!(b.recurrent & bit(v)) || (done & bit(v))) continue;
    Mask C = 0;
    for (int u = 0; u < n; ++u)
      if ((b.reach[v] & bit(u)) && (b.reach[u] & bit(v))) C |= bit(u);
    done |= C;
    b.components.push_back(C);
  }
  for (Mask C : b.components) {
    Mask out = 0;
    for (int v = 0; v < n; ++v)
      if (C & bit(v)) out |= b.reach[v];
    b.terminal.push_back((out & ~C) == 0);
    b.initial.push_back((reaching(b, C) & ~C) == 0);
  }
  const Mask all = n == 32 ? ~Mask{0} : bit(n) - 1;
  b.transitive = b.components.size() == 1 && b.components[0] == all;
  if (b.transitive) {
    // Primitive iff some power is full; Wielandt bound on the exponent.
    std::vector<Mask> P = g.succ;
    const int bound = (n - 1) * (n - 1) + 1;
    for (int k = 1; k <= bound && !b.mixing; ++k) {
      b.mixing = std::all_of(P.begin(), P.end(), [&](Mask m) { return m == all; });
      std::vector<Mask> next(n, 0);
      for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u)
          if (P[v] & bit(u)) next[v] |= g.succ[u];
      P = std::move(next);
    }
  }
  return b;
}

Mask reaching(const BruteForce& b, Mask m) {
  Mask r = 0;
  for (std::size_t v = 0; v < b.reach.size(); ++v)
    if (b.reach[v] & m) r |= bit(static_cast<int>(v));
  return r;
}

OracleResult compare_engine(const Digraph& dg) {
  const int n = dg.n;
  const BruteForce b = brute_force(dg);
  const ChainGraph g = engine_graph(dg);
  const ChainDecomposition d = classify_components(g, chain_components(g), 0.0);
  OracleResult r;
  auto expect = [&](bool ok, const std::string& what) {
    ++r.queries;
    if (!ok) r.mismatches.push_back(what);
  };
  expect(to_mask(d.recurrent) == b.recurrent,
         "CR " + mask_string(to_mask(d.recurrent), n) + " vs " + mask_string(b.recurrent, n));
  expect(d.size() == b.components.size(), "component count");
  for (std::size_t i = 0; i < std::min(d.size(), b.components.size()); ++i) {
    const std::string tag = "component " + mask_string(b.components[i], n);
    expect(to_mask(d.at(i)) == b.components[i], tag + " vs " + mask_string(to_mask(d.at(i)), n));
    expect(d.info[i].is_terminal == b.terminal[i], tag + " terminal");
    expect(d.info[i].is_initial == b.initial[i], tag + " initial");
    expect(to_mask(chain_forward_set(g, d.at(i))) ==
               [&] {
                 Mask m = 0;
                 for (int v = 0; v < n; ++v)
                   if (b.components[i] & bit(v)) m |= b.reach[v];
                 return m;
               }(),
           tag + " forward set");
  }
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      expect(chain_reaches(g, a, c) == bool(b.reach[a] & bit(c)),
             "reach " + std::to_string(a) + "->" + std::to_string(c));
  for (int x = 0; x < n; ++x) {
    const TerminalReach t = reach_terminal(g, d, static_cast<Cell>(x));
    bool ok = t.component < b.components.size() && b.terminal[t.component] &&
              (b.components[t.component] & bit(static_cast<int>(t.y))) && !t.path.empty() &&
              t.path.front() == static_cast<Cell>(x) && t.path.back() == t.y;
    for (std::size_t k = 0; ok && k + 1 < t.path.size(); ++k) ok = dg.succ[t.path[k]] & bit(static_cast<int>(t.path[k + 1]));
    expect(ok, "terminal walk from " + std::to_string(x));
  }
  expect(is_chain_transitive(g) == b.transitive, "transitivity");
  expect(is_chain_mixing(g) == b.mixing, "mixing");
  return r;
}

OracleResult corollary_5_3(const Digraph& dg) {
  const int n = dg.n;
  const BruteForce b = brute_force(dg);
  const ChainGraph g = engine_graph(dg);
  const ChainDecomposition d = classify_components(g, chain_components(g), 0.0);
  OracleResult r;
  std::vector<Mask> closed;  // forward-closed subsets
  for (Mask U = 0; U < bit(n); ++U) {
    Mask img = 0;
    for (int v = 0; v < n; ++v)
      if (U & bit(v)) img |= dg.succ[v];
    if ((img & ~U) == 0) closed.push_back(U);
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Mask C = to_mask(d.at(i));
    const Mask into = reaching(b, C);
    const bool not_initial = (into & ~C) != 0;
    const bool enumerated =
        std::any_of(closed.begin(), closed.end(), [&](Mask U) { return (C & ~U) == 0 && (into & ~U) != 0; });
    bool constructive = false;
    std::string why;
    try {
      const BoundaryConstruction bc = attractor_with_C_in_boundary(g, d, i);
      if (!bc.c_is_initial) {
        const Attractor& A = bc.construction->attractor;
        constructive = bc.chain_boundary;
        d.at(i).for_each([&](Cell x) {
          const EscapeWitness w = escape_witness(g, A, x);
          bool ok = w.found && !A.lambda.contains(w.z) && w.path.size() >= 2 && w.path.front() == w.z &&
                    w.path.back() == x;
          for (std::size_t k = 0; ok && k + 1 < w.path.size(); ++k)
            ok = dg.succ[w.path[k]] & bit(static_cast<int>(w.path[k + 1]));
          if (!ok) {
            constructive = false;
            why = " (no escape witness for " + std::to_string(x) + ")";
          }
        });
      }
    } catch (const std::exception& e) {
      why = std::string(" (") + e.what() + ")";
    }
    const std::string tag = "C=" + mask_string(C, n);
    ++r.queries;
    if (!(not_initial == enumerated && enumerated == constructive && constructive == !d.info[i].is_initial))
      r.mismatches.push_back(tag + ": not-initial " + std::to_string(not_initial) + ", enumeration " +
                             std::to_string(enumerated) + ", construction " + std::to_string(constructive) + why);
  }
  return r;
}

Lemma44Result lemma_4_4(const Digraph& dg) {
  const ChainGraph g = engine_graph(dg);
  const ChainDecomposition d = classify_components(g, chain_components(g), 0.0);
  Lemma44Result r;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.info[i].is_initial || !d.info[i].is_terminal || !clopen_in_CR(g, d, i)) continue;
    ++r.applicable;
    if (is_clopen(g.space(), d.at(i)))
      ++r.clopen;
    else
      r.counterexamples.push_back(to_mask(d.at(i)));
  }
  return r;
}

OracleResult permutation_components(const Digraph& dg) {
  const ChainGraph g = engine_graph(dg);
  const ChainDecomposition d = classify_components(g, chain_components(g), 0.0);
  OracleResult r;
  ++r.queries;
  if (d.recurrent.count() != static_cast<std::size_t>(dg.n)) r.mismatches.push_back("permutation with transient cells");
  for (std::size_t i = 0; i < d.size(); ++i) {
    ++r.queries;
    if (!d.info[i].is_initial || !d.info[i].is_terminal)
      r.mismatches.push_back("cycle " + mask_string(to_mask(d.at(i)), dg.n) + " not initial and terminal");
  }
  return r;
}

}  // namespace dchain::harness
