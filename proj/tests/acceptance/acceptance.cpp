// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "crosscycle/canonical.hpp"
#include "crosscycle/classify.hpp"
#include "crosscycle/error.hpp"
#include "crosscycle/example_system.hpp"
#include "crosscycle/hypotheses.hpp"
#include "crosscycle/poincare.hpp"
#include "support.hpp"

using namespace crosscycle;
using std::numbers::pi;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// Cycles located anywhere in the run, with whether their verdict was the stable one.
struct SeenCycle {
  CycleRecord cycle;
  VerdictKind verdict;
  bool lienard;
};
std::vector<SeenCycle> g_cycles;

void remember(const FullReport& r, bool lienard) {
  for (const auto& c : r.search.cycles) g_cycles.push_back({c, r.verdict.kind, lienard});
}

char buf[512];
template <class... A>
const char* fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

Outcome example_reproduction() {
  Outcome o;
  const double chis[] = {1.0, 0.0, kDefaultEpsilon};
  const std::size_t expect[] = {1, 2, 3};
  std::string times;
  for (int i = 0; i < 3; ++i) {
    for (bool matrix : {false, true}) {
      const auto t0 = Clock::now();
      const FullReport r = matrix ? full_report(example_pwl(chis[i])) : full_report(example_system(chis[i]));
      const double dt = seconds_since(t0);
      remember(r, !matrix);
      if (!matrix) times += fmt("%s%.3fs", times.empty() ? "" : ", ", dt);
      const char* form = matrix ? "matrix" : "Lienard";
      if (r.verdict.kind != VerdictKind::AtMostOneStable) o.fail(fmt("chi=%g %s: verdict %s", chis[i], form, std::string(to_string(r.verdict.kind)).c_str()));
      if (r.search.cycles.size() != 1) o.fail(fmt("chi=%g %s: %zu cycles", chis[i], form, r.search.cycles.size()));
      else if (r.search.cycles[0].enclosed.size() != expect[i])
        o.fail(fmt("chi=%g %s: encloses %zu", chis[i], form, r.search.cycles[0].enclosed.size()));
      if (dt >= 5.0) o.fail(fmt("chi=%g %s: %.2fs", chis[i], form, dt));
    }
  }
  if (o.pass) o.detail = "one stable cycle enclosing 1, 2, 3 equilibria; runtimes " + times;
  return o;
}

Outcome closed_form_left_map() {
  Outcome o;
  const LienardSpec sys = example_system(0.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double z0 = 1.0 + 99.0 * i / 19.0;
    const HalfMapResult r = half_map_left(sys, z0);
    const double expect = -std::exp(-2 * pi) * z0;
    if (!r.ok()) {
      o.fail(fmt("no return from z0=%g", z0));
      continue;
    }
    worst = std::max(worst, std::fabs(r.value - expect) / std::fabs(expect));
  }
  if (worst > 1e-6) o.fail(fmt("max relative error %.3g", worst));
  if (o.pass) o.detail = fmt("max relative error %.3g over 20 ordinates", worst);
  return o;
}

Outcome slope_limits() {
  Outcome o;
  const ReturnMaps m(SwitchedField::from_lienard(example_system(1.0)));
  const double y0 = -1e4, h = 1.0;
  const double sR = (m.right(y0 + h).value - m.right(y0 - h).value) / (2 * h);
  const double sP = (m.composed(y0 + h).value - m.composed(y0 - h).value) / (2 * h);
  const double eR = std::fabs(sR / -std::exp(pi) - 1.0), eP = std::fabs(sP / std::exp(-pi) - 1.0);
  if (eR > 0.02) o.fail(fmt("P_R' = %.6f vs %.6f", sR, -std::exp(pi)));
  if (eP > 0.02) o.fail(fmt("P' = %.6f vs %.6f", sP, std::exp(-pi)));
  if (o.pass) o.detail = fmt("P_R' = %.5f (%.2g%%), P' = %.6f (%.2g%%)", sR, 100 * eR, sP, 100 * eP);
  return o;
}

Outcome right_map_at_fold() {
  Outcome o;
  const double t = testing::t_hat_plus();
  const double expect = -2.0 * std::exp(t) * std::sin(t);
  const HalfMapResult r = half_map_right(example_system(1.0), 0.0);
  const double err = std::fabs(r.value - expect) / expect;
  if (!r.ok() || err > 1e-6) o.fail(fmt("P_R(0) = %.10g vs %.10g", r.value, expect));
  if (o.pass) o.detail = fmt("t_hat = %.12f, P_R(0) = %.10f, parametric %.10f, rel err %.2g", t, r.value, expect, err);
  return o;
}

Outcome star_equations() {
  Outcome o;
  const LienardSpec ex = LienardSpec::from_canonical(canonicalize(example_pwl(0.0)));
  const StarScan s = solve_star(ex, PCoord(ex).pmax());
  if (s.roots.size() != 1) {
    o.fail(fmt("%zu star solutions at chi = 0", s.roots.size()));
    return o;
  }
  if (std::fabs(s.roots[0].x_plus - 8.0 / 3.0) > 1e-9 || std::fabs(s.roots[0].x_minus + 4.0 / 3.0) > 1e-9)
    o.fail(fmt("x+* = %.12g, x-* = %.12g", s.roots[0].x_plus, s.roots[0].x_minus));

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> t(0.3, 3.0), d(0.3, 6.0), a(-3.0, 3.0);
  std::bernoulli_distribution forced(0.5);
  int with_root = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    CanonicalParams c{t(rng), -t(rng), d(rng), d(rng), a(rng), a(rng), 0.0};
    if (forced(rng)) {
      // Arrange aR/tR > aL/tL and dR/tR^2 > dL/tL^2 so that Lambda has a root.
      c.aR = std::fabs(c.aR) + 0.1;
      c.aL = std::fabs(c.aL);
      if (c.dR / (c.tR * c.tR) <= c.dL / (c.tL * c.tL)) c.dR = 1.5 * c.dL * c.tR * c.tR / (c.tL * c.tL) + 0.1;
    }
    const LienardSpec sys = LienardSpec::from_canonical(c);
    const double pmax = PCoord(sys).pmax();
    const StarScan cf = solve_star(sys, pmax, 100.0, StarMethod::ClosedForm);
    const StarScan gen = solve_star(sys, pmax, 100.0, StarMethod::Generic);
    if (cf.roots.size() != gen.roots.size()) {
      o.fail(fmt("system %d: %zu closed-form vs %zu scanned roots", i, cf.roots.size(), gen.roots.size()));
      continue;
    }
    with_root += !cf.roots.empty();
    for (std::size_t k = 0; k < cf.roots.size(); ++k) {
      worst = std::max({worst, std::fabs(cf.roots[k].x_plus - gen.roots[k].x_plus),
                        std::fabs(cf.roots[k].x_minus - gen.roots[k].x_minus)});
    }
  }
  if (worst > 1e-8) o.fail(fmt("closed form vs scan differ by %.3g", worst));
  if (with_root < 40) o.fail(fmt("only %d of 100 systems had a star solution", with_root));
  if (o.pass) o.detail = fmt("x+* = 8/3, x-* = -4/3; %d/100 random systems with roots, max diff %.2g", with_root, worst);
  return o;
}

// Runs last: checks every cycle met in the other criteria.
Outcome hyperbolicity() {
  Outcome o;
  std::size_t stable = 0;
  double worst = 0.0;
  for (const auto& s : g_cycles) {
    const double e = std::exp(s.cycle.lambda_gamma);
    const double rel = std::fabs(s.cycle.map_derivative - e) / e;
    worst = std::max(worst, rel);
    if (rel > 0.01) o.fail(fmt("y_D=%.6g: P'=%.6g, exp(lambda)=%.6g", s.cycle.y_D, s.cycle.map_derivative, e));
    if (s.verdict == VerdictKind::AtMostOneStable) {
      ++stable;
      if (!(s.cycle.lambda_gamma < 0.0)) o.fail(fmt("stable verdict with lambda=%.6g", s.cycle.lambda_gamma));
    }
  }
  if (g_cycles.empty()) o.fail("no cycles located");
  if (o.pass) o.detail = fmt("%zu cycles (%zu under AtMostOneStable), max |P'-e^lambda|/e^lambda = %.2g", g_cycles.size(), stable, worst);
  return o;
}

Outcome area_identity() {
  Outcome o;
  std::size_t n = 0;
  double worst = 0.0;
  for (const auto& s : g_cycles) {
    if (!s.lienard) continue;
    ++n;
    const double rel = std::fabs(s.cycle.area_plus - s.cycle.area_minus) / (s.cycle.area_plus + s.cycle.area_minus);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-4)) o.fail(fmt("S+=%.8g S-=%.8g", s.cycle.area_plus, s.cycle.area_minus));
  }
  if (n == 0) o.fail("no Lienard cycles located");
  if (o.pass) o.detail = fmt("%zu cycles in the (p, y) plane, max relative imbalance %.2g", n, worst);
  return o;
}

Outcome annulus_detection() {
  Outcome o;
  const LienardSpec sys({parse("1"), parse("x"), std::nullopt}, {parse("-1"), parse("x"), std::nullopt});
  const FullReport r = full_report(sys);
  if (r.verdict.kind != VerdictKind::Annulus) o.fail("verdict " + std::string(to_string(r.verdict.kind)));
  const ReturnMaps maps(SwitchedField::from_lienard(sys), FinderOptions{}.fine_flow);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double y0 = -0.05 * std::pow(2.0, i);
    const ReturnResult p = maps.composed(y0);
    if (!p.ok()) {
      o.fail(fmt("no return from %g", y0));
      continue;
    }
    worst = std::max(worst, std::fabs(p.value - y0));
  }
  if (worst > 1e-8) o.fail(fmt("max |P(y0) - y0| = %.3g", worst));
  if (o.pass) o.detail = fmt("verdict Annulus; max |P(y0)-y0| = %.2g over 10 ordinates", worst);
  return o;
}

// Random sliding-free systems: half from the general ensemble, half built
// around foci of opposite stability where cycles actually occur.
PwlSpec consistency_sample(std::mt19937_64& rng, int i) {
  if (i % 2 == 0) return testing::random_pwl(rng, true);
  std::uniform_real_distribution<double> t(0.1, 3.0), d(0.5, 6.0), a(-3.0, 3.0);
  const double tR = t(rng), tL = -t(rng);
  const double dR = std::max(d(rng), 0.3 + tR * tR / 4), dL = std::max(d(rng), 0.3 + tL * tL / 4);
  return testing::conjugate(to_pwl({tR, tL, dR, dL, a(rng), a(rng), 0.0}), testing::random_change(rng));
}

Outcome consistency_suite() {
  Outcome o;
  std::mt19937_64 rng(424242);
  const auto t0 = Clock::now();
  int no_cross = 0, at_most = 0, cycles = 0, other = 0;
  for (int i = 0; i < 10000; ++i) {
    const PwlSpec p = consistency_sample(rng, i);
    const FullReport r = full_report(p);
    if (i % 10 == 1) remember(r, false);
    const std::size_t n = r.search.cycles.size();
    cycles += static_cast<int>(n);
    switch (r.verdict.kind) {
      case VerdictKind::NoCrossingCycles:
        ++no_cross;
        if (n > 0) o.fail(fmt("sample %d: NoCrossingCycles with %zu cycles", i, n));
        break;
      case VerdictKind::AtMostOne:
      case VerdictKind::AtMostOneStable:
      case VerdictKind::AtMostOneUnstable:
        ++at_most;
        if (n >= 2) o.fail(fmt("sample %d: %s with %zu cycles", i, std::string(to_string(r.verdict.kind)).c_str(), n));
        break;
      default:
        ++other;
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 600.0) o.fail(fmt("runtime %.1fs", dt));
  if (o.pass)
    o.detail = fmt("10^4 systems in %.1fs: %d NoCrossingCycles, %d AtMostOne*, %d other, %d cycles found, 0 violations", dt,
                   no_cross, at_most, other, cycles);
  return o;
}

Outcome symmetry_property() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> t(0.2, 3.0), d(0.3, 5.0), a(0.1, 3.0);
  std::bernoulli_distribution coin(0.5);
  int reflected = 0, swapped = 0;
  for (int i = 0; i < 100; ++i) {
    // C5: aL = 0 > aR, C6: aL = 0 < aR, C7: aL < 0, aR < 0; with a negative determinant
    const int k = 5 + i % 3;
    CanonicalParams c{t(rng), -t(rng), d(rng), -d(rng), 0.0, 0.0, 0.0};
    if (coin(rng)) std::swap(c.dR, c.dL);
    if (coin(rng)) std::swap(c.tR, c.tL);
    c.aR = k == 6 ? a(rng) : -a(rng);
    c.aL = k == 7 ? -a(rng) : 0.0;
    const CanonicalParams img = point_reflection(c);
    if (offset_case(c) != k || offset_case(img) != k - 3) {
      o.fail(fmt("sample %d: C%d maps to C%d", i, offset_case(c), offset_case(img)));
      continue;
    }
    if (verdict_pwl(c).kind != verdict_pwl(img).kind) o.fail(fmt("sample %d: C%d and its image disagree", i, k));
    if (verdict_pwl(time_reversal(c)).kind != swap_stability(verdict_pwl(c).kind)) o.fail(fmt("sample %d: time reversal", i));
    ++reflected;
  }
  for (int i = 0; i < 100; ++i) {
    const CanonicalParams c{t(rng), -t(rng), d(rng), d(rng), 3.0 * a(rng) - 4.5, 3.0 * a(rng) - 4.5, 0.0};
    const VerdictKind v = verdict_pwl(c).kind, w = verdict_pwl(time_reversal(c)).kind;
    if (w != swap_stability(v)) o.fail(fmt("sample %d: %s reversed to %s", i, std::string(to_string(v)).c_str(), std::string(to_string(w)).c_str()));
    swapped += v == VerdictKind::AtMostOneStable || v == VerdictKind::AtMostOneUnstable;
  }
  if (swapped < 20) o.fail(fmt("only %d samples exercised the stable/unstable swap", swapped));
  if (o.pass) o.detail = fmt("%d C5-C7 reflections, %d stability swaps among 100 reversals, 0 violations", reflected, swapped);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Criteria 6 and 7 inspect the cycles collected by 1, 8 and 9, so run them last.
  const std::vector<Criterion> order{
      {1, "example reproduction", example_reproduction},
      {2, "closed-form left map", closed_form_left_map},
      {3, "slope limits", slope_limits},
      {4, "P_R(0)", right_map_at_fold},
      {5, "star equations", star_equations},
      {8, "annulus detection", annulus_detection},
      {9, "verdict/search consistency", consistency_suite},
      {10, "symmetry", symmetry_property},
      {6, "hyperbolicity consistency", hyperbolicity},
      {7, "area identity", area_identity},
  };
  // Cycles of the curated canonical systems in Lienard form feed 6 and 7 as well.
  for (const auto& c : testing::curated_canonical()) {
    try {
      remember(full_report(LienardSpec::from_canonical(c)), true);
    } catch (const Error&) {
    }
  }
  bool all = true;
  for (const auto& c : order) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    all = all && out.pass;
    char line[1024];
    std::snprintf(line, sizeof line, "criterion %2d  %-4s  %-27s %s  [%.2fs]", c.id, out.pass ? "PASS" : "FAIL", c.name,
                  out.detail.c_str(), seconds_since(t0));
    std::puts(line);
    std::fflush(stdout);
  }
  std::puts(all ? "all criteria passed" : "some criteria FAILED");
  return all ? 0 : 1;
}
