#include "crosscycle/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "crosscycle/error.hpp"

namespace crosscycle {

std::string_view to_string(MapStatus s) noexcept {
  switch (s) {
    case MapStatus::Ok: return "ok";
    case MapStatus::NoReturn: return "no-return";
    case MapStatus::BelowThreshold: return "below-threshold";
    case MapStatus::WrongDirection: return "wrong-direction";
  }
  return "?";
}

namespace {

double compute_left_threshold(const SwitchedField& field, const FlowOptions& opts) {
  const double yT = field.tangency_y();
  if (!field.fold_visible(Side::Left)) return yT;
  FlowOptions o = opts;
  o.keep_samples = false;
  Integrator integ(field, o);
  const OrbitSegment seg = integ.segment(Side::Left, {0.0, yT}, Direction::Backward);
  if (seg.end != SegmentEnd::SwitchCrossing && seg.end != SegmentEnd::Tangency) return yT;
  const double z = seg.end_point.y;
  return field.entry_sign() * (z - yT) < 0.0 ? z : yT;
}

}  // namespace

ReturnMaps::ReturnMaps(SwitchedField field, FlowOptions opts)
    : field_(std::move(field)), opts_(opts), z_hat_(compute_left_threshold(field_, opts_)) {}

ReturnMaps::ReturnMaps(SwitchedField field, FlowOptions opts, double z_hat)
    : field_(std::move(field)), opts_(opts), z_hat_(z_hat) {}

ReturnMaps ReturnMaps::with_options(FlowOptions opts) const { return ReturnMaps(field_, opts, z_hat_); }

HalfMapResult ReturnMaps::run(Side s, double y0) const {
  HalfMapResult r;
  const Vec2 start{0.0, y0};
  if (norm(field_.eval(s, start)) == 0.0) return r;
  Integrator integ(field_, opts_);
  OrbitSegment seg = integ.segment(s, start);
  r.flight_time = seg.t1 - seg.t0;
  r.divergence_integral = seg.divergence_integral;
  r.p_dy_integral = seg.p_dy_integral;
  if (seg.end == SegmentEnd::SwitchCrossing || seg.end == SegmentEnd::Tangency) {
    r.status = MapStatus::Ok;
    r.value = seg.end_point.y;
  }
  r.orbit = std::move(seg);
  return r;
}

HalfMapResult ReturnMaps::right(double y0) const {
  const double v = field_.entry_sign() * (y0 - field_.tangency_y());
  if (v < 0.0 || (v == 0.0 && !field_.fold_visible(Side::Right))) {
    HalfMapResult r;
    r.status = MapStatus::WrongDirection;
    return r;
  }
  return run(Side::Right, y0);
}

HalfMapResult ReturnMaps::left(double z0) const {
  const double yT = field_.tangency_y();
  const double v = field_.entry_sign() * (z0 - yT);
  HalfMapResult r;
  if (v > 0.0 || (v == 0.0 && !field_.fold_visible(Side::Left))) {
    r.status = MapStatus::WrongDirection;
    return r;
  }
  if (std::fabs(z0 - yT) < std::fabs(z_hat_ - yT) * (1.0 - 1e-12)) {
    r.status = MapStatus::BelowThreshold;
    r.value = z_hat_;
    return r;
  }
  return run(Side::Left, z0);
}

ReturnResult ReturnMaps::composed(double y0) const {
  ReturnResult out;
  out.right = right(y0);
  if (!out.right.ok()) {
    out.status = out.right.status;
    return out;
  }
  out.left = left(out.right.value);
  out.status = out.left.status;
  out.value = out.left.value;
  return out;
}

HalfMapResult half_map_right(const LienardSpec& sys, double y0, const FlowOptions& opts) {
  return ReturnMaps(SwitchedField::from_lienard(sys), opts).right(y0);
}

HalfMapResult half_map_left(const LienardSpec& sys, double z0, const FlowOptions& opts) {
  return ReturnMaps(SwitchedField::from_lienard(sys), opts).left(z0);
}

// ---------------------------------------------------------------------------
// Parametric half maps

ParametricHalfMap parametric_half_map(const CanonicalParams& c, Side side) {
  const double t = side == Side::Right ? c.tR : c.tL;
  const double d = side == Side::Right ? c.dR : c.dL;
  const double a = side == Side::Right ? c.aR : c.aL;
  const double w2 = d - 0.25 * t * t;
  if (!(w2 > 0.0)) throw NotFocus(std::string(to_string(side)) + " subsystem is not a focus");
  ParametricHalfMap m;
  m.side = side;
  m.alpha = 0.5 * t;
  m.beta = std::sqrt(w2);
  m.x_e = a / d;
  const double half = std::numbers::pi / m.beta;
  if (m.x_e == 0.0) {
    m.linear_slope = -std::exp(m.alpha * half);
    m.tau_lo = m.tau_hi = half;
  } else if (side_sign(side) * m.x_e > 0.0) {
    m.tau_lo = half;
    m.tau_hi = 2.0 * half;
  } else {
    m.tau_lo = 0.0;
    m.tau_hi = half;
  }
  return m;
}

double ParametricHalfMap::entry(double tau) const {
  const double bt = beta * tau;
  return alpha * x_e + beta * x_e * (std::exp(-alpha * tau) - std::cos(bt)) / std::sin(bt);
}

double ParametricHalfMap::exit(double tau) const {
  const double bt = beta * tau;
  return alpha * x_e - beta * x_e * (std::exp(alpha * tau) - std::cos(bt)) / std::sin(bt);
}

// ---------------------------------------------------------------------------
// Cycle location

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

CycleRecord characterize_cycle(const ReturnMaps& maps, double y_star) {
  FlowOptions keep = maps.options();
  keep.keep_samples = true;
  const ReturnMaps with_orbit = maps.with_options(keep);
  const ReturnResult ret = with_orbit.composed(y_star);
  if (!ret.ok()) throw NotClosed("orbit through y=" + std::to_string(y_star) + " does not return");

  CycleRecord c;
  c.y_D = y_star;
  c.y_B = ret.right.value;
  c.right_time = ret.right.flight_time;
  c.left_time = ret.left.flight_time;
  c.period = c.right_time + c.left_time;
  c.lambda_gamma = ret.right.divergence_integral + ret.left.divergence_integral;
  c.fixed_point_residual = std::fabs(ret.value - y_star);
  if (maps.field().lienard()) {
    c.area_plus = std::fabs(ret.right.p_dy_integral);
    c.area_minus = std::fabs(ret.left.p_dy_integral);
  }

  FlowOptions lean = maps.options();
  lean.keep_samples = false;
  const ReturnMaps fd = maps.with_options(lean);
  const double h = std::max(1e-6, 1e-6 * std::fabs(y_star));
  const ReturnResult up = fd.composed(y_star + h);
  const ReturnResult dn = fd.composed(y_star - h);
  c.map_derivative = up.ok() && dn.ok() ? (up.value - dn.value) / (2.0 * h)
                                        : std::numeric_limits<double>::quiet_NaN();

  for (const Sample& s : ret.right.orbit.samples) c.polyline.push_back(s.z);
  const auto& ls = ret.left.orbit.samples;
  for (std::size_t i = 1; i < ls.size(); ++i) c.polyline.push_back(ls[i].z);
  c.x_min = c.x_max = 0.0;
  for (const Vec2& p : c.polyline) {
    c.x_min = std::min(c.x_min, p.x);
    c.x_max = std::max(c.x_max, p.x);
  }
  for (const EquilibriumRecord& e : maps.field().census().equilibria) {
    if (point_in_polygon(e.location, c.polyline)) c.enclosed.push_back(e);
  }
  return c;
}

namespace {

struct Displacement {
  bool ok = false;
  double d = 0.0;
};

Displacement displacement(const ReturnMaps& maps, double y) {
  try {
    const ReturnResult r = maps.composed(y);
    if (r.ok()) return {true, r.value - y};
  } catch (const Error&) {
  }
  return {};
}

// Illinois false position on a sign-change bracket.
std::optional<double> refine(const ReturnMaps& maps, double a, double fa, double b, double fb, double tol) {
  double best = std::fabs(fa) < std::fabs(fb) ? a : b;
  double best_f = std::min(std::fabs(fa), std::fabs(fb));
  for (int it = 0; it < 200; ++it) {
    if (best_f <= tol) return best;
    if (std::fabs(b - a) <= 4e-16 * std::max(std::fabs(a), std::fabs(b))) break;
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    Displacement dc = displacement(maps, c);
    if (!dc.ok) {
      c = 0.5 * (a + b);
      dc = displacement(maps, c);
      if (!dc.ok) return std::nullopt;
    }
    if (std::fabs(dc.d) < best_f) {
      best = c;
      best_f = std::fabs(dc.d);
    }
    if ((dc.d > 0.0) != (fb > 0.0)) {
      a = b;
      fa = fb;
    } else {
      fa *= 0.5;
    }
    b = c;
    fb = dc.d;
  }
  return best_f <= std::max(tol, 1e-9 * (1.0 + std::fabs(best))) ? std::optional<double>(best) : std::nullopt;
}

}  // namespace

FinderResult find_crossing_cycles(const SwitchedField& field, const FinderOptions& opts) {
  FlowOptions coarse_flow = opts.scan_flow;
  coarse_flow.keep_samples = false;
  FlowOptions fine_flow = opts.fine_flow;
  fine_flow.keep_samples = false;
  const ReturnMaps coarse(field, coarse_flow);
  const ReturnMaps fine = coarse.with_options(fine_flow);

  const double yT = field.tangency_y();
  const double sigma = field.entry_sign();
  std::vector<double> ys{yT};
  for (double s = opts.scan_start; s <= opts.bracket_cap; s *= 2.0) ys.push_back(yT + sigma * s);

  FinderResult res;
  for (double y : ys) {
    ScanPoint sp;
    sp.y0 = y;
    try {
      const ReturnResult r = coarse.composed(y);
      sp.status = r.status;
      sp.displacement = r.value - y;
    } catch (const Error&) {
      sp.status = MapStatus::NoReturn;
    }
    if (sp.status == MapStatus::Ok && y != yT && std::fabs(sp.displacement) <= opts.neutral_tol * (1.0 + std::fabs(y))) {
      const Displacement f = displacement(fine, y);
      if (f.ok) {
        sp.displacement = f.d;
        sp.neutral = std::fabs(f.d) <= opts.fixed_point_tol * (1.0 + std::fabs(y));
      }
    }
    res.scan.push_back(sp);
  }

  const auto& sc = res.scan;
  const std::size_t n = sc.size();
  auto ok = [&](std::size_t i) { return sc[i].status == MapStatus::Ok; };
  auto neutral = [&](std::size_t i) { return i < n && ok(i) && sc[i].neutral; };
  std::vector<bool> in_band(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (neutral(i) && ((i > 0 && neutral(i - 1)) || neutral(i + 1))) {
      in_band[i] = true;
      res.neutral.push_back(sc[i].y0);
      res.annulus_band = true;
    }
  }

  std::vector<double> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_band[i] || !ok(i)) continue;
    if (sc[i].neutral) {
      roots.push_back(sc[i].y0);
      continue;
    }
    if (i + 1 >= n || !ok(i + 1) || in_band[i + 1] || sc[i + 1].neutral) continue;
    const double da = sc[i].displacement, db = sc[i + 1].displacement;
    if (da == 0.0 || db == 0.0 || (da > 0.0) == (db > 0.0)) continue;
    // Re-evaluate the bracket ends at the refinement tolerance.
    const Displacement fa = displacement(fine, sc[i].y0);
    const Displacement fb = displacement(fine, sc[i + 1].y0);
    if (!fa.ok || !fb.ok || (fa.d > 0.0) == (fb.d > 0.0)) continue;
    if (auto r = refine(fine, sc[i].y0, fa.d, sc[i + 1].y0, fb.d, opts.fixed_point_tol)) roots.push_back(*r);
  }

  // Between a scan point where P is undefined and one where it is defined,
  // find the edge of the domain; a root may sit between the edge and the
  // defined point without any sign change on the scan grid.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (ok(i) == ok(i + 1)) continue;
    const std::size_t good = ok(i) ? i : i + 1;
    if (in_band[good] || sc[good].neutral) continue;
    const Displacement fg = displacement(fine, sc[good].y0);
    if (!fg.ok) continue;
    double out = sc[ok(i) ? i + 1 : i].y0, in = sc[good].y0;
    Displacement fin = fg;
    for (int it = 0; it < 60 && std::fabs(out - in) > 1e-13 * (1.0 + std::fabs(in)); ++it) {
      const double mid = 0.5 * (out + in);
      const Displacement fm = displacement(fine, mid);
      if (fm.ok) {
        in = mid;
        fin = fm;
      } else {
        out = mid;
      }
    }
    if (in == sc[good].y0 || fin.d == 0.0 || (fin.d > 0.0) == (fg.d > 0.0)) continue;
    if (auto r = refine(fine, in, fin.d, sc[good].y0, fg.d, opts.fixed_point_tol)) roots.push_back(*r);
  }

  for (double r : roots) {
    if (std::fabs(r - yT) <= 1e-9 * (1.0 + std::fabs(yT))) continue;
    const bool dup = std::any_of(res.cycles.begin(), res.cycles.end(), [&](const CycleRecord& c) {
      return std::fabs(c.y_D - r) <= 1e-8 * (1.0 + std::fabs(r));
    });
    if (dup) continue;
    try {
      res.cycles.push_back(characterize_cycle(fine, r));
    } catch (const Error&) {
    }
  }
  return res;
}

void write_cycle_csv(std::ostream& out, const CycleRecord& c) {
  out << "x,y\n";
  char buf[96];
  for (const Vec2& p : c.polyline) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.x, p.y);
    out << buf;
  }
}

}  // namespace crosscycle
