#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dchain/attractors.hpp"

namespace dchain::harness {

using Mask = std::uint32_t;

// Small digraph with bitmask rows (n <= 16). adjacency, when nonempty, gives a
// symmetric cell adjacency (self excluded) whose hop count is the metric;
// otherwise the space is discrete.
struct Digraph {
  int n = 0;
  std::vector<Mask> succ;
  std::vector<Mask> adjacency;
};

// Every node gets at least one successor.
Digraph random_digraph(int n, double density, std::uint64_t seed);
Digraph random_permutation(int n, std::uint64_t seed);
// Random symmetric adjacency plus dynamics; with close_targets every edge
// c -> t also yields c -> t' for each t' adjacent to t.
Digraph random_topological_digraph(int n, double density, std::uint64_t seed, bool close_targets);

GridSpace engine_space(const Digraph& g);
ChainGraph engine_graph(const Digraph& g);

struct BruteForce {
  std::vector<Mask> reach;  // paths of length >= 1
  Mask recurrent = 0;
  std::vector<Mask> components;  // ordered by smallest node
  std::vector<bool> terminal, initial;
  bool transitive = false;
  bool mixing = false;
};

BruteForce brute_force(const Digraph& g);
// Nodes that reach some node of m by a path of length >= 1.
Mask reaching(const BruteForce& b, Mask m);

struct OracleResult {
  long queries = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
  void merge(const OracleResult& o);
};

// SCCs, CR, terminal/initial at epsilon 0, pairwise reachability, Lemma 5.3
// walks, Lemma 5.4 forward sets, transitivity and mixing.
OracleResult compare_engine(const Digraph& g);

// "C not initial" against "some forward-closed U contains C and is entered
// from outside", by enumeration of all subsets, and against the constructive
// boundary attractor with escape witnesses.
OracleResult corollary_5_3(const Digraph& g);

struct Lemma44Result {
  int applicable = 0;  // components initial, terminal and clopen in CR
  int clopen = 0;
  std::vector<Mask> counterexamples;
};

Lemma44Result lemma_4_4(const Digraph& g);

// Bijective dynamics: every component initial and terminal.
OracleResult permutation_components(const Digraph& g);

std::string mask_string(Mask m, int n);

}  // namespace dchain::harness
