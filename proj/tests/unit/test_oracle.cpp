#include <doctest.h>

#include "dchain/harness/oracle.hpp"
#include "dchain/rng.hpp"

using namespace dchain;
using namespace dchain::harness;

TEST_CASE("brute force on a hand-built digraph") {
  // 0 <-> 1, 1 -> 2, 2 -> 2.
  const Digraph g{3, {0b010, 0b101, 0b100}, {}};
  const auto b = brute_force(g);
  CHECK(b.recurrent == 0b111);
  REQUIRE(b.components.size() == 2);
  CHECK(b.components[0] == 0b011);
  CHECK(b.components[1] == 0b100);
  CHECK(b.initial[0]);
  CHECK_FALSE(b.terminal[0]);
  CHECK(b.terminal[1]);
  CHECK_FALSE(b.initial[1]);
  CHECK_FALSE(b.transitive);
  CHECK(reaching(b, 0b100) == 0b111);
  CHECK(mask_string(0b101, 3) == "{0,2}");
  CHECK(compare_engine(g).ok());
  CHECK(corollary_5_3(g).ok());
}

TEST_CASE("brute force mixing uses the cycle gcd") {
  const Digraph three{3, {0b010, 0b100, 0b001}, {}};
  CHECK(brute_force(three).transitive);
  CHECK_FALSE(brute_force(three).mixing);
  const Digraph chord{3, {0b010, 0b100, 0b011}, {}};
  CHECK(brute_force(chord).mixing);
}

TEST_CASE("generators") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_digraph(9, 0.1, seed);
    for (Mask m : g.succ) CHECK(m != 0);
    const auto p = random_permutation(9, seed);
    Mask hit = 0;
    for (Mask m : p.succ) {
      CHECK(std::popcount(m) == 1);
      hit |= m;
    }
    CHECK(hit == 0x1ff);
    const auto t = random_topological_digraph(9, 0.2, seed, true);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        CHECK((((t.adjacency[i] >> j) & 1) == ((t.adjacency[j] >> i) & 1)));
  }
  CHECK(random_digraph(7, 0.3, 4).succ == random_digraph(7, 0.3, 4).succ);
}

TEST_CASE("engine agrees with brute force on random digraphs") {
  OracleResult total;
  Rng rng(2024);
  for (int k = 0; k < 300; ++k) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const double p = std::array{0.1, 0.2, 0.4}[k % 3];
    const auto g = random_digraph(n, p, rng.next());
    total.merge(compare_engine(g));
    total.merge(corollary_5_3(g));
  }
  CHECK(total.queries > 0);
  for (const auto& m : total.mismatches) INFO(m);
  CHECK(total.ok());
}

TEST_CASE("bijective dynamics and clopen components") {
  OracleResult perm;
  for (std::uint64_t seed = 0; seed < 100; ++seed) perm.merge(permutation_components(random_permutation(10, seed)));
  CHECK(perm.ok());

  int applicable = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = lemma_4_4(random_topological_digraph(8, 0.2, seed, true));
    applicable += r.applicable;
    CHECK(r.clopen == r.applicable);
    CHECK(r.counterexamples.empty());
  }
  CHECK(applicable > 0);
}
