#include "crosscycle/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crosscycle/error.hpp"

namespace crosscycle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// {y : (a y + c)(d y + e) < 0}
SlidingSet negative_set(double a, double c, double d, double e) {
  SlidingSet s;
  if (a == 0.0 && d == 0.0) {
    if (c * e < 0.0) s.pieces.push_back({-kInf, kInf});
    return s;
  }
  if (a == 0.0 || d == 0.0) {
    // constant k times a line m y + n: negative where k (m y + n) < 0
    const double k = a == 0.0 ? c : e;
    const double m = a == 0.0 ? d : a;
    const double n = a == 0.0 ? e : c;
    if (k == 0.0) return s;
    const double root = -n / m + 0.0;
    if (k * m > 0.0) s.pieces.push_back({-kInf, root});
    else s.pieces.push_back({root, kInf});
    return s;
  }
  const double r1 = -c / a + 0.0;  // no negative zero in printed intervals
  const double r2 = -e / d + 0.0;
  const double lo = std::min(r1, r2);
  const double hi = std::max(r1, r2);
  if (a * d > 0.0) {
    if (lo < hi) s.pieces.push_back({lo, hi});
  } else {
    s.pieces.push_back({-kInf, lo});
    s.pieces.push_back({hi, kInf});
  }
  return s;
}

}  // namespace

SlidingSet sliding_set(const PwlSpec& p) {
  const double ap = p.A_plus.a12, am = p.A_minus.a12;
  if (ap * am > 0.0) {
    // Sliding-free exactly when the canonical offset b vanishes; use the same
    // tolerance so the two tests agree.
    const CanonicalParams c = canonicalize(p);
    if (offset_vanishes(p, c)) return {};
  }
  return negative_set(ap, p.b_plus.x, am, p.b_minus.x);
}

CanonicalParams canonicalize(const PwlSpec& p) {
  const Mat2& Ap = p.A_plus;
  const Mat2& Am = p.A_minus;
  if (!(Ap.a12 * Am.a12 > 0.0)) {
    throw CoefficientSignError("a12+ a12- <= 0: no crossing limit cycles and no canonical form");
  }
  const double ratio = Am.a12 / Ap.a12;
  CanonicalParams c;
  c.tR = Ap.trace();
  c.tL = Am.trace();
  c.dR = Ap.det();
  c.dL = Am.det();
  c.b = ratio * p.b_plus.x - p.b_minus.x;
  // Differences at rounding level are exact zeros (boundary equilibria).
  auto diff = [](double u, double v) { return std::fabs(u - v) <= 1e-13 * (std::fabs(u) + std::fabs(v)) ? 0.0 : u - v; };
  c.aL = diff(Am.a12 * p.b_minus.y, Am.a22 * p.b_minus.x);
  c.aR = ratio * diff(Ap.a12 * p.b_plus.y, Ap.a22 * p.b_plus.x);
  return c;
}

bool offset_vanishes(const PwlSpec& p, const CanonicalParams& c) {
  const double scale = 1.0 + norm(p.b_plus) + norm(p.b_minus);
  return std::fabs(c.b) <= 1e-12 * scale;
}

LienardSpec as_lienard(const CanonicalParams& c, double b_tol) {
  if (std::fabs(c.b) > b_tol) throw SlidingPresent("canonical offset b != 0: sliding set present");
  CanonicalParams zeroed = c;
  zeroed.b = 0.0;
  return LienardSpec::from_canonical(zeroed);
}

PwlSpec to_pwl(const CanonicalParams& c) {
  PwlSpec p;
  p.A_plus = {c.tR, -1.0, c.dR, 0.0};
  p.b_plus = {c.b, -c.aR};
  p.A_minus = {c.tL, -1.0, c.dL, 0.0};
  p.b_minus = {0.0, -c.aL};
  return p;
}

}  // namespace crosscycle
