#pragma once

// The switched Liénard example
//
//   right:  x' = 2x - y,   y' = 2x - 2
//   left:   x' = -4x - y,  y' = 5x - 5 chi
//
// with a limit cycle around 1, 2 or 3 equilibria for chi = 1, 0, and small
// negative chi.

#include "crosscycle/model.hpp"

namespace crosscycle {

inline constexpr double kDefaultEpsilon = -0.01;

[[nodiscard]] LienardSpec example_system(double chi);

/// Same system as a PwlSpec, z' = A z + b.
[[nodiscard]] PwlSpec example_pwl(double chi);

}  // namespace crosscycle
