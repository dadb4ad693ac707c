#pragma once

// Reduction of a general piecewise-linear system z' = A+- z + b+- to the
// Liénard canonical form
//
//   z' = [[tR, -1], [dR, 0]] z - (-b, aR)   for x > 0
//   z' = [[tL, -1], [dL, 0]] z - (0,  aL)   for x < 0.

#include <vector>

#include "crosscycle/model.hpp"

namespace crosscycle {

/// Open interval on the switching line; either end may be infinite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// {y : (a12+ y + b1+)(a12- y + b1-) < 0}. Empty vector means no sliding.
struct SlidingSet {
  std::vector<Interval> pieces;
  [[nodiscard]] bool empty() const noexcept { return pieces.empty(); }
};

[[nodiscard]] SlidingSet sliding_set(const PwlSpec& p);

/// Throws CoefficientSignError when a12+ a12- <= 0.
[[nodiscard]] CanonicalParams canonicalize(const PwlSpec& p);

/// |b| <= 1e-12 (1 + |b+| + |b-|): the float-safe test for b = 0.
[[nodiscard]] bool offset_vanishes(const PwlSpec& p, const CanonicalParams& c);

/// f+ = tR, g+ = dR x - aR, f- = tL, g- = dL x - aL. Throws SlidingPresent
/// when |b| > b_tol.
[[nodiscard]] LienardSpec as_lienard(const CanonicalParams& c, double b_tol = 1e-12);

/// The canonical system written as a PwlSpec.
[[nodiscard]] PwlSpec to_pwl(const CanonicalParams& c);

}  // namespace crosscycle
