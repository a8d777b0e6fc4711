#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dchain/systems.hpp"

namespace dchain {

struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<Cell> targets;

  std::span<const Cell> row(Cell c) const {
    return {targets.data() + offsets[c], offsets[c + 1] - offsets[c]};
  }
  static Csr from_rows(std::vector<std::vector<Cell>>& rows);
  Csr transposed(std::size_t n) const;
};

// δ-chain digraph: c -> c' iff c' lies in closed_neighborhood(forward_images(c), delta).
class ChainGraph {
 public:
  ChainGraph(std::shared_ptr<const CellMap> F, double delta, std::shared_ptr<const Csr> succ,
             std::shared_ptr<const Csr> pred, bool reversed = false);

  const GridSpace& space() const { return F_->space(); }
  const CellMap& cell_map() const { return *F_; }
  std::shared_ptr<const CellMap> cell_map_ptr() const { return F_; }
  std::size_t cell_count() const { return F_->cell_count(); }
  double delta() const { return delta_; }
  // Paths in the graph are point-level chains with this step bound.
  double soundness_bound() const;
  bool is_reversed() const { return reversed_; }

  std::span<const Cell> successors(Cell c) const;
  std::span<const Cell> predecessors(Cell c) const;
  CellSet successor_set(Cell c) const;
  CellSet step(const CellSet& S) const;
  std::size_t edge_count() const { return succ_->targets.size(); }

  // Same graph with every edge reversed (the chain graph of the inverse map).
  ChainGraph reversed() const;

 private:
  std::shared_ptr<const CellMap> F_;
  double delta_;
  std::shared_ptr<const Csr> succ_, pred_;
  bool reversed_;
};

ChainGraph build_chain_graph(std::shared_ptr<const CellMap> F, double delta);
ChainGraph build_chain_graph(const CellMap& F, double delta);

bool chain_reaches(const ChainGraph& g, Cell a, Cell b);
// Cells reached from S by paths of length >= 1.
CellSet forward_reach(const ChainGraph& g, const CellSet& S);
CellSet backward_reach(const ChainGraph& g, const CellSet& S);
// Shortest path (length >= 1) from some cell of `from` to some cell of `to`; empty if none.
std::vector<Cell> chain_path(const ChainGraph& g, const CellSet& from, const CellSet& to);

CellSet chain_recurrent_set(const ChainGraph& g);

struct ComponentInfo {
  bool is_terminal = false;
  bool is_initial = false;
  double escape_radius = 0;
  double reverse_escape_radius = 0;
};

struct ChainDecomposition {
  CellSet recurrent;
  // Recurrent SCCs ordered by smallest cell.
  std::vector<CellSet> components;
  // Component index per cell, -1 for transient cells.
  std::vector<int> component_of;
  // Condensation: nodes 0..k-1 are the components, the rest transient singletons.
  std::vector<int> node_of;
  std::vector<std::vector<int>> condensation;
  std::vector<bool> is_sink, is_source;
  std::vector<ComponentInfo> info;
  double epsilon = 0;

  std::size_t size() const { return components.size(); }
  const CellSet& at(std::size_t i) const { return components.at(i); }
};

// Strongly connected components by iterative Tarjan; comp id per cell.
std::vector<int> strongly_connected(const ChainGraph& g, int* count = nullptr);

ChainDecomposition chain_components(const ChainGraph& g);
ChainDecomposition classify_components(const ChainGraph& g, ChainDecomposition d, double epsilon);

struct StabilityResult {
  bool stable = false;
  double escape_radius = 0;
  // On failure: path from S to a cell outside the epsilon-neighborhood.
  std::vector<Cell> witness;
};

StabilityResult is_chain_stable(const ChainGraph& g, const CellSet& S, double epsilon);

bool is_chain_transitive(const ChainGraph& g);
// gcd of cycle lengths of a strongly connected graph; 0 if not strongly connected.
long chain_period(const ChainGraph& g);
bool is_chain_mixing(const ChainGraph& g);

// Pairwise minimal center distance between components; 0x0 for one component.
Eigen::MatrixXd component_separation(const GridSpace& space, const ChainDecomposition& d);

bool clopen_in_CR(const ChainGraph& g, const ChainDecomposition& d, std::size_t component);

struct RefinementLevel {
  int resolution = 0;
  double delta = 0;
  std::size_t component_count = 0;
  std::size_t recurrent_count = 0;
  // Matched coarser component per component (-1 on the first level).
  std::vector<int> match;
  bool shrinkage_ok = true;
};

struct RefinementReport {
  std::vector<RefinementLevel> levels;
  std::vector<ChainDecomposition> decompositions;
  bool counts_stable = true;
  bool shrinkage_monotone = true;
};

using CellMapFactory = std::function<std::shared_ptr<const CellMap>(int resolution)>;

RefinementReport refine(const CellMapFactory& factory, const std::vector<int>& resolutions,
                        const std::vector<double>& deltas);

struct MinimalityCheck {
  std::size_t component = 0;
  bool applicable = false;
  bool passed = true;
};

struct SeparationCheck {
  std::size_t component = 0;
  std::size_t samples = 0;
  double min_distance = 0;
  bool passed = true;
};

struct MinimalitySeparationReport {
  std::vector<MinimalityCheck> minimality;
  std::vector<SeparationCheck> separation;
  bool passed = true;
};

MinimalitySeparationReport minimality_and_separation_checks(const ChainGraph& g, const ChainDecomposition& d,
                                                            int samples = 64, int horizon = 200);

}  // namespace dchain
