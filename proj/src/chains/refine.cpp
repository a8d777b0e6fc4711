#include <map>

#include "dchain/chains.hpp"
#include "dchain/errors.hpp"

namespace dchain {

RefinementReport refine(const CellMapFactory& factory, const std::vector<int>& resolutions,
                        const std::vector<double>& deltas) {
  if (resolutions.size() != deltas.size()) throw ConfigError("grid and delta lists differ in length");
  if (deltas.size() < 2) throw ConfigError("refinement needs at least two levels");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw ConfigError("deltas must be strictly decreasing");

  RefinementReport rep;
  std::shared_ptr<const CellMap> coarse_map;
  for (std::size_t lvl = 0; lvl < deltas.size(); ++lvl) {
    auto F = factory(resolutions[lvl]);
    ChainGraph g = build_chain_graph(F, deltas[lvl]);
    ChainDecomposition d = chain_components(g);
    RefinementLevel L;
    L.resolution = resolutions[lvl];
    L.delta = deltas[lvl];
    L.component_count = d.size();
    L.recurrent_count = d.recurrent.count();
    L.match.assign(d.size(), -1);
    if (lvl > 0) {
      const GridSpace& Xc = coarse_map->space();
      const GridSpace& Xf = F->space();
      const ChainDecomposition& dc = rep.decompositions.back();
      const CellSet fattened = closed_neighborhood(Xc, dc.recurrent, 2 * Xc.cell_radius());
      for (std::size_t i = 0; i < d.size(); ++i) {
        std::map<int, std::size_t> overlap;
        d.components[i].for_each([&](Cell c) {
          const Cell cc = Xc.cell_of(Xf.center(c));
          if (!fattened.contains(cc)) L.shrinkage_ok = false;
          const int j = dc.component_of[cc];
          if (j >= 0) ++overlap[j];
        });
        std::size_t best = 0;
        for (auto [j, v] : overlap)
          if (v > best) {
            best = v;
            L.match[i] = j;
          }
      }
      d.recurrent.for_each([&](Cell c) {
        if (!fattened.contains(Xc.cell_of(Xf.center(c)))) L.shrinkage_ok = false;
      });
      rep.counts_stable = rep.counts_stable && L.component_count == rep.levels.back().component_count;
      rep.shrinkage_monotone = rep.shrinkage_monotone && L.shrinkage_ok;
    }
    rep.levels.push_back(std::move(L));
    rep.decompositions.push_back(std::move(d));
    coarse_map = F;
  }
  return rep;
}

}  // namespace dchain
