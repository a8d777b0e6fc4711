#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dchain/chains.hpp"

namespace dchain {

// A cell set U stands for the open set int(union of its closed cells).
struct TrappingRegion {
  CellSet U;
};

enum class Relation { cell_map, chain_graph };

struct Attractor {
  TrappingRegion trapping;
  CellSet lambda;
  CellSet boundary;
  int iterations_to_fixpoint = 0;
  Relation relation = Relation::cell_map;
};

// The images of all cells of closure(U) lie in U.
bool is_trapping(const CellMap& F, const CellSet& U);
// Throws ArgumentError when U is not trapping.
TrappingRegion make_trapping_region(const CellMap& F, const CellSet& U);

// Greatest fixed point of S -> U ∩ F(S).
Attractor attractor_from_trapping(const CellMap& F, const TrappingRegion& T);
// Same fixed point for the chain relation of g; U must still be trapping for F.
Attractor attractor_from_trapping(const ChainGraph& g, const TrappingRegion& T);

struct ChainStableAttractor {
  Attractor attractor;
  double construction_delta = 0;
  CellSet forward_set;  // S together with its reach in the construction graph
};

// Default ladder: multiples of the grid spacing, decreasing.
std::vector<double> default_delta_ladder(const GridSpace& space);

ChainStableAttractor attractor_from_chain_stable(const ChainGraph& g, const CellSet& S, double a,
                                                 std::vector<double> ladder = {});

CellSet chain_forward_set(const ChainGraph& g, const CellSet& C);

struct BoundaryConstruction {
  bool c_is_initial = false;
  std::optional<ChainStableAttractor> construction;
  Cell witness_y = 0;
  double a = 0;
  bool c_in_lambda = false;
  // Every cell of C is reached from a cell outside lambda.
  bool chain_boundary = false;
  // Cells of C lying in the topological boundary of lambda.
  std::size_t in_topological_boundary = 0;
};

BoundaryConstruction attractor_with_C_in_boundary(const ChainGraph& g, const ChainDecomposition& d,
                                                  std::size_t component);

struct BoundaryStabilityReport {
  bool vacuous = false;
  bool stable = false;
  double escape_radius = 0;
  std::vector<Cell> witness;
  bool shadowing_certified = false;
};

BoundaryStabilityReport verify_boundary_chain_stable(const ChainGraph& g, const Attractor& A, double epsilon,
                                                     bool shadowing_certified);

struct EscapeWitness {
  bool found = false;
  Cell z = 0;
  std::vector<Cell> path;  // z ... x
  bool via_adjacency = false;
};

// x must lie in closure(lambda).
EscapeWitness escape_witness(const ChainGraph& g, const Attractor& A, Cell x);

struct TerminalReach {
  std::size_t component = 0;
  Cell y = 0;
  std::vector<Cell> path;  // x ... y
};

TerminalReach reach_terminal(const ChainGraph& g, const ChainDecomposition& d, Cell x);

struct ThinTerminal {
  CellSet D;
  double construction_delta = 0;
  CellSet lambda;
};

// Throws ArgumentError when preconditions fail, ResolutionInsufficient when no D is found.
ThinTerminal terminal_with_empty_interior_near(const ChainGraph& g, const ChainDecomposition& d,
                                               std::size_t component, double a, bool shadowing_certified);

struct NeighborPair {
  std::size_t terminal = 0;
  std::size_t initial = 0;
};

NeighborPair neighbors_of_nonclopen_bidirectional(const ChainGraph& g, const ChainDecomposition& d,
                                                  std::size_t component, double a);

CellSet basin(const CellMap& F, const CellSet& S, int horizon);
// basin(S) \ S ⊆ one-cell fattening of basin(boundary(S)).
bool basin_boundary_inclusion(const CellMap& F, const CellSet& S, int horizon);

// Named geometric description of an open region.
struct USpec {
  enum class Kind { all, arc, ball, cells } kind = Kind::all;
  double lo = 0, hi = 0;  // arc endpoints (radians, may be negative)
  Point center;
  double radius = 0;
  std::vector<Cell> cells;

  CellSet realize(const GridSpace& space) const;
};

struct BoundaryStudyLevel {
  int resolution = 0;
  bool trapping = false;
  std::size_t boundary_components = 0;
  bool ring_hypothesis = false;
  std::vector<double> hausdorff;  // per iteration, metric units
  int band_entry = -1;            // first iteration below two cell diameters
  bool band_ok = false;
};

struct BoundaryStudy {
  std::vector<BoundaryStudyLevel> levels;
  bool count_stable = false;
};

BoundaryStudy boundary_refinement_study(const PointMap& f, const USpec& U, const std::vector<int>& resolutions,
                                        int iterations);

std::shared_ptr<const GridSpace> grid_for(const PointMap& f, int resolution);

}  // namespace dchain
