#pragma once

// Theorem-backed verdicts on the number of crossing limit cycles.

#include <optional>
#include <string>
#include <vector>

#include "crosscycle/canonical.hpp"
#include "crosscycle/hypotheses.hpp"
#include "crosscycle/poincare.hpp"

namespace crosscycle {

/// (t_L, d_L, a_L, t_R, d_R, a_R) -> (-t_R, d_R, -a_R, -t_L, d_L, -a_L); from
/// (t, x, y) -> (-t, -x, y). Reverses time, so stability swaps.
[[nodiscard]] CanonicalParams time_reversal(const CanonicalParams& c);

/// (t_L, d_L, a_L, t_R, d_R, a_R) -> (t_R, d_R, -a_R, t_L, d_L, -a_L); from
/// (x, y) -> (-x, -y). Maps C5, C6, C7 onto C2, C3, C4.
[[nodiscard]] CanonicalParams point_reflection(const CanonicalParams& c);

/// (t_L, d_L, a_L, t_R, d_R, a_R) -> (-t_L, d_L, a_L, -t_R, d_R, a_R); from
/// (y, t) -> (-y, -t). Reverses time.
[[nodiscard]] CanonicalParams y_reflection(const CanonicalParams& c);

/// 1..7 for the sign cases C1..C7 of (a_L, a_R).
[[nodiscard]] int offset_case(const CanonicalParams& c);

/// AtMostOneStable <-> AtMostOneUnstable; other kinds unchanged.
[[nodiscard]] VerdictKind swap_stability(VerdictKind k) noexcept;

/// Pre: b = 0. Throws DegenerateSystem when d_R d_L = 0 and
/// PreconditionError when b != 0.
[[nodiscard]] Verdict verdict_pwl(const CanonicalParams& c);

struct AnalysisOptions {
  double xmax = 100.0;
  FinderOptions finder{};
};

[[nodiscard]] Verdict verdict_lienard(const LienardSpec& sys, const AnalysisOptions& opts = {});

struct FullReport {
  Verdict verdict;
  std::optional<CanonicalParams> canonical;
  std::optional<HypothesisReport> hypotheses;
  Census census;
  FinderResult search;
  bool search_run = false;
  bool refused = false;  ///< sliding set present; nothing beyond the census was analysed
  SlidingSet sliding;
  std::vector<std::string> contradictions;
};

[[nodiscard]] FullReport full_report(const PwlSpec& sys, const AnalysisOptions& opts = {});
[[nodiscard]] FullReport full_report(const LienardSpec& sys, const AnalysisOptions& opts = {});

}  // namespace crosscycle
