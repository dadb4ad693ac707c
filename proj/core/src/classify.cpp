#include "crosscycle/classify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crosscycle/error.hpp"

namespace crosscycle {

CanonicalParams time_reversal(const CanonicalParams& c) {
  CanonicalParams r;
  r.tL = -c.tR;
  r.dL = c.dR;
  r.aL = -c.aR;
  r.tR = -c.tL;
  r.dR = c.dL;
  r.aR = -c.aL;
  r.b = c.b;
  return r;
}

CanonicalParams point_reflection(const CanonicalParams& c) {
  CanonicalParams r;
  r.tL = c.tR;
  r.dL = c.dR;
  r.aL = -c.aR;
  r.tR = c.tL;
  r.dR = c.dL;
  r.aR = -c.aL;
  r.b = c.b;
  return r;
}

CanonicalParams y_reflection(const CanonicalParams& c) {
  CanonicalParams r = c;
  r.tL = -c.tL;
  r.tR = -c.tR;
  return r;
}

int offset_case(const CanonicalParams& c) {
  const double aL = c.aL, aR = c.aR;
  if (aL == 0.0 && aR == 0.0) return 1;
  if (aL > 0.0 && aR <= 0.0) return 2;
  if (aL < 0.0 && aR >= 0.0) return 3;
  if (aL > 0.0 && aR > 0.0) return 4;
  if (aL == 0.0 && aR < 0.0) return 5;
  if (aL == 0.0 && aR > 0.0) return 6;
  return 7;
}

VerdictKind swap_stability(VerdictKind k) noexcept {
  if (k == VerdictKind::AtMostOneStable) return VerdictKind::AtMostOneUnstable;
  if (k == VerdictKind::AtMostOneUnstable) return VerdictKind::AtMostOneStable;
  return k;
}

namespace {

bool same(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

Evidence params_evidence(const std::string& condition, const CanonicalParams& c, std::string note = {}) {
  return {condition,
          {{"tR", c.tR}, {"tL", c.tL}, {"dR", c.dR}, {"dL", c.dL}, {"aR", c.aR}, {"aL", c.aL}},
          std::move(note)};
}

Verdict make(VerdictKind k, std::string reason, Evidence ev) {
  Verdict v;
  v.kind = k;
  v.reason = std::move(reason);
  v.evidence.push_back(std::move(ev));
  return v;
}

// Theorem for b = 0, t_L < 0 < t_R, d_L > 0, d_R > 0.
Verdict focus_focus_verdict(const CanonicalParams& c) {
  const double r = c.aR / c.tR, l = c.aL / c.tL;
  const double kR = c.dR / (c.tR * c.tR), kL = c.dL / (c.tL * c.tL);
  Evidence ev{"aR/tR vs aL/tL and dR/tR^2 vs dL/tL^2", {{"aR/tR", r}, {"aL/tL", l}, {"dR/tR^2", kR}, {"dL/tL^2", kL}}, {}};
  if (same(r, l)) {
    if (same(kR, kL)) {
      ev.note = "Lambda vanishes identically; any crossing periodic orbit lies in a periodic annulus";
      return make(VerdictKind::Annulus, "aR/tR = aL/tL and dR/tR^2 = dL/tL^2", ev);
    }
    ev.note = "necessary condition dR/tR^2 = dL/tL^2 fails";
    return make(VerdictKind::NoCrossingCycles, "aR/tR = aL/tL but dR/tR^2 != dL/tL^2", ev);
  }
  if (r > l) {
    if (kR > kL && !same(kR, kL)) {
      ev.note = "H1-H3 and H5 hold; a crossing periodic orbit is unique and stable";
      return make(VerdictKind::AtMostOneStable, "aR/tR > aL/tL and dR/tR^2 > dL/tL^2", ev);
    }
    ev.note = "necessary condition dR/tR^2 > dL/tL^2 fails";
    return make(VerdictKind::NoCrossingCycles, "aR/tR > aL/tL but dR/tR^2 <= dL/tL^2", ev);
  }
  if (kR < kL && !same(kR, kL)) {
    ev.note = "time-reversed image satisfies the stable case";
    return make(VerdictKind::AtMostOneUnstable, "aR/tR < aL/tL and dR/tR^2 < dL/tL^2", ev);
  }
  ev.note = "necessary condition dR/tR^2 < dL/tL^2 fails";
  return make(VerdictKind::NoCrossingCycles, "aR/tR < aL/tL but dR/tR^2 >= dL/tL^2", ev);
}

Verdict pwl_tree(const CanonicalParams& c, int depth) {
  if (depth > 4) throw PreconditionError("case reduction did not terminate");

  if (c.tL * c.tR >= 0.0) {
    return make(VerdictKind::NoCrossingCycles, "tL tR >= 0",
                params_evidence("tL tR >= 0", c, "traces of equal sign or a vanishing trace exclude crossing limit cycles"));
  }
  if (c.dL > 0.0 && c.dR > 0.0) {
    if (c.tL < 0.0) return focus_focus_verdict(c);
    // t_R < 0 < t_L: reverse time and reflect y.
    Verdict v = pwl_tree(y_reflection(c), depth + 1);
    v.kind = swap_stability(v.kind);
    v.evidence.push_back(params_evidence("change (x, y, t) -> (x, -y, -t)", c, "stability swapped back"));
    return v;
  }

  // t_L t_R < 0 and at least one determinant negative.
  const int k = offset_case(c);
  switch (k) {
    case 1:
      return make(VerdictKind::AtMostOne, "C1: aL = aR = 0",
                  params_evidence("C1", c, "continuous system; at most one crossing limit cycle"));
    case 2:
      if (c.aR == 0.0 && c.tR * c.tR - 4.0 * c.dR >= 0.0) {
        return make(VerdictKind::NoCrossingCycles, "C2: aR = 0 and tR^2 - 4dR >= 0",
                    params_evidence("C2", c, "right equilibrium on the switching line is neither focus nor center"));
      }
      return make(VerdictKind::AtMostOne, "C2: aL > 0 >= aR",
                  params_evidence("C2", c, "origin is monodromic; at most one crossing limit cycle"));
    case 3:
      return make(VerdictKind::NoCrossingCycles, "C3 with dL < 0 or dR < 0",
                  params_evidence("C3", c, "a saddle lies in the opposite half plane"));
    case 4:
      return make(VerdictKind::AtMostOne, "C4: aL > 0 and aR > 0",
                  params_evidence("C4", c, "rescaling x and t by aR, aL gives a continuous system"));
    default: {
      Verdict v = pwl_tree(point_reflection(c), depth + 1);
      v.evidence.push_back(params_evidence("C" + std::to_string(k) + " -> C" + std::to_string(k - 3) +
                                               " via (x, y) -> (-x, -y)",
                                           c));
      return v;
    }
  }
}

}  // namespace

Verdict verdict_pwl(const CanonicalParams& c) {
  if (c.dR * c.dL == 0.0) throw DegenerateSystem("dR dL = 0");
  if (c.b != 0.0) throw PreconditionError("b != 0: the system has a sliding set");
  return pwl_tree(c, 0);
}

// ---------------------------------------------------------------------------

namespace {

Verdict lienard_verdict(const LienardSpec& sys, const HypothesisReport& rep, const AnalysisOptions& opts,
                        const FinderResult* search, FinderResult* search_out) {
  const auto values = [&] {
    return std::vector<std::pair<std::string, double>>{{"x_e", rep.h1.x_e},
                                                       {"eta+", rep.h3.eta_plus},
                                                       {"eta-", rep.h3.eta_minus},
                                                       {"pmax", rep.pmax}};
  };
  if (!rep.h2) {
    return make(VerdictKind::Inconclusive, "H2 fails", {"H2", {}, "f+ > 0 on x > 0 and f- < 0 on x < 0 is required"});
  }
  if (rep.star.lambda_identically_zero && rep.h3.converged) {
    FinderResult local;
    if (!search) {
      local = find_crossing_cycles(SwitchedField::from_lienard(sys), opts.finder);
      search = &local;
    }
    Verdict v;
    if (search->closed_orbit_found()) {
      v = make(VerdictKind::Annulus, "Lambda vanishes on (0, pmax] and a crossing periodic orbit exists",
               {"Lambda = 0", {{"sup|Lambda|", rep.star.lambda_sup}, {"pmax", rep.pmax}}, "periodic annulus"});
    } else {
      v = make(VerdictKind::NoCrossingCycles, "Lambda vanishes on (0, pmax]",
               {"Lambda = 0", {{"sup|Lambda|", rep.star.lambda_sup}, {"pmax", rep.pmax}},
                "every crossing periodic orbit would lie in an annulus; none found in the scan"});
    }
    if (search_out && search == &local) *search_out = std::move(local);
    return v;
  }
  if (!rep.h1.holds) {
    return make(VerdictKind::Inconclusive, "H1 fails", {"H1", values(), "g+ must change sign at most once on x > 0"});
  }
  if (!rep.h3.holds) {
    return make(VerdictKind::Inconclusive, "H3 fails",
                {"H3", values(), rep.h3.converged ? "eta+ <= eta- is violated" : "phi+- have no limit as p -> 0+"});
  }
  if (rep.star.roots.empty()) {
    return make(VerdictKind::NoCrossingCycles, "H1-H3 hold and the star equations have no solution",
                {"star solutions", values(), "necessary condition fails on the scanned range"});
  }
  if (rep.unique_star && ((rep.h4.checked && rep.h4.holds) || (rep.h5.checked && rep.h5.holds))) {
    const StarSolution& s = rep.star.roots.front();
    Evidence ev{rep.h5.holds ? "H5" : "H4",
                {{"x-*", s.x_minus}, {"x+*", s.x_plus}, {"p*", s.p}, {"h4 margin", rep.h4.margin}, {"h5 margin", rep.h5.margin}},
                "unique star solution on the scanned range"};
    return make(VerdictKind::AtMostOneStable, "H1-H3, unique star solution, and " + ev.condition, ev);
  }
  if (!rep.unique_star) {
    return make(VerdictKind::Inconclusive, "star solution is not unique",
                {"star solutions", {{"count", static_cast<double>(rep.star.roots.size())}}, {}});
  }
  return make(VerdictKind::Inconclusive, "neither H4 nor H5 could be certified", {"H4/H5", values(), {}});
}

void flag_contradictions(FullReport& r) {
  const FinderResult& s = r.search;
  const std::size_t n = s.cycles.size();
  const VerdictKind k = r.verdict.kind;
  if (k == VerdictKind::NoCrossingCycles && (n > 0 || s.annulus_band)) {
    r.contradictions.push_back("verdict NoCrossingCycles but the search found a closed orbit");
  }
  const bool at_most_one =
      k == VerdictKind::AtMostOne || k == VerdictKind::AtMostOneStable || k == VerdictKind::AtMostOneUnstable;
  if (at_most_one && (n > 1 || s.annulus_band)) {
    r.contradictions.push_back("verdict allows at most one cycle but the search found " +
                               (s.annulus_band ? std::string("an annulus") : std::to_string(n)));
  }
  for (const CycleRecord& c : s.cycles) {
    if (k == VerdictKind::AtMostOneStable && !(c.lambda_gamma < 0.0)) {
      r.contradictions.push_back("stable verdict but cycle has lambda >= 0");
    }
    if (k == VerdictKind::AtMostOneUnstable && !(c.lambda_gamma > 0.0)) {
      r.contradictions.push_back("unstable verdict but cycle has lambda <= 0");
    }
  }
}

std::string describe(const SlidingSet& s) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < s.pieces.size(); ++i) {
    if (i) os << " U ";
    os << '(' << s.pieces[i].lo << ", " << s.pieces[i].hi << ')';
  }
  return os.str();
}

}  // namespace

Verdict verdict_lienard(const LienardSpec& sys, const AnalysisOptions& opts) {
  const HypothesisReport rep = hypothesis_report(sys, opts.xmax);
  return lienard_verdict(sys, rep, opts, nullptr, nullptr);
}

FullReport full_report(const PwlSpec& sys, const AnalysisOptions& opts) {
  sys.validate();
  FullReport r;
  r.census = equilibrium_census(sys);
  if (!(sys.A_plus.a12 * sys.A_minus.a12 > 0.0)) {
    r.verdict = make(VerdictKind::NoCrossingCycles, "a12+ a12- <= 0",
                     {"a12+ a12- <= 0", {{"a12+", sys.A_plus.a12}, {"a12-", sys.A_minus.a12}},
                      "x-components of both fields share a sign on the crossing set"});
    return r;
  }
  CanonicalParams c = canonicalize(sys);
  r.sliding = sliding_set(sys);
  if (!offset_vanishes(sys, c) || !r.sliding.empty()) {
    r.refused = true;
    r.canonical = c;
    const std::string where = r.sliding.empty() ? std::string("(b != 0)") : describe(r.sliding);
    r.verdict = make(VerdictKind::Inconclusive, "sliding set nonempty on y in " + where + "; analysis refused",
                     params_evidence("sliding set", c, "b = " + std::to_string(c.b)));
    return r;
  }
  c.b = 0.0;
  r.canonical = c;
  r.verdict = verdict_pwl(c);
  r.hypotheses = hypothesis_report(LienardSpec::from_canonical(c), opts.xmax);
  r.search = find_crossing_cycles(SwitchedField::from_pwl(sys), opts.finder);
  r.search_run = true;
  flag_contradictions(r);
  return r;
}

FullReport full_report(const LienardSpec& sys, const AnalysisOptions& opts) {
  FullReport r;
  r.census = equilibrium_census(sys);
  r.canonical = sys.canonical();
  r.hypotheses = hypothesis_report(sys, opts.xmax);
  r.search = find_crossing_cycles(SwitchedField::from_lienard(sys), opts.finder);
  r.search_run = true;
  r.verdict = lienard_verdict(sys, *r.hypotheses, opts, &r.search, nullptr);
  flag_contradictions(r);
  return r;
}

}  // namespace crosscycle
