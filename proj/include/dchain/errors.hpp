#pragma once

#include <stdexcept>
#include <string>

namespace dchain {

// Bad input to an operation (precondition violated, index out of range).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unknown system name, out-of-range parameter, malformed scenario.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A grid construction found no admissible parameter at the current resolution.
struct ResolutionInsufficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer lift of a torus step error is not unambiguous.
struct LiftAmbiguity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dchain
