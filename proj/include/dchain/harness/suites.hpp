#pragma once

#include <string>

#include "dchain/harness/report.hpp"
#include "dchain/harness/scenario.hpp"
#include "dchain/shadowing.hpp"

namespace dchain::harness {

// Suites run concurrently into separate fragments, merged in canonical order.
Report run_scenario(const Scenario& s);

// One suite into r (no timing).
void run_suite(const std::string& name, const Scenario& s, Report& r);

// Sup error of the best orbit found by nested dense grid search around x_0
// (zooming boxes); for toral automorphisms on short chains.
double minimax_shadow_error(const PointMap& f, const PseudoOrbit& po, int grid = 41, int zooms = 6);

// Regression floor for the cat map expansivity estimate.
inline constexpr double kExpansivityBaseline = 0.1;
// Modulus below this counts as collapsed.
inline constexpr double kModulusCollapse = 1e-4;

}  // namespace dchain::harness
