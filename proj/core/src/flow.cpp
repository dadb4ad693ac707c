#include "crosscycle/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "crosscycle/canonical.hpp"
#include "crosscycle/error.hpp"

namespace crosscycle {

// ---------------------------------------------------------------------------
// SwitchedField

SwitchedField SwitchedField::from_lienard(const LienardSpec& sys) {
  SwitchedField fld;
  fld.lienard_ = std::make_shared<const LienardSpec>(sys);
  fld.census_ = equilibrium_census(sys);
  for (Side s : {Side::Right, Side::Left}) {
    SideData& d = s == Side::Right ? fld.right_ : fld.left_;
    const Expr dg = differentiate(sys.g_expr(s));
    if (sys.f_expr(s).is_literal() && dg.is_literal()) {
      d.linear = true;
      d.A = {sys.f_expr(s).literal_value(), -1.0, dg.literal_value(), 0.0};
      d.b = {0.0, sys.g(s, 0.0)};
    }
  }
  for (const EquilibriumRecord& r : fld.census_.equilibria) {
    if (r.kind == EquilibriumKind::RegularRight) fld.right_.eq.push_back(r.location);
    else if (r.kind == EquilibriumKind::RegularLeft) fld.left_.eq.push_back(r.location);
    else if (r.kind == EquilibriumKind::Boundary) {
      if (sys.g(Side::Right, 0.0) == 0.0) fld.right_.eq.push_back(r.location);
      if (sys.g(Side::Left, 0.0) == 0.0) fld.left_.eq.push_back(r.location);
    }
  }
  return fld;
}

SwitchedField SwitchedField::from_pwl(const PwlSpec& sys) {
  sys.validate();
  if (!(sys.A_plus.a12 * sys.A_minus.a12 > 0.0) || !offset_vanishes(sys, canonicalize(sys))) {
    throw SlidingPresent("the switching line carries a sliding set; crossing flow is undefined");
  }
  SwitchedField fld;
  fld.right_ = {true, sys.A_plus, sys.b_plus, {}};
  fld.left_ = {true, sys.A_minus, sys.b_minus, {}};
  fld.a12_right_ = sys.A_plus.a12;
  fld.a12_left_ = sys.A_minus.a12;
  fld.y_T_ = -sys.b_plus.x / sys.A_plus.a12;
  fld.sigma_ = sys.A_plus.a12 > 0.0 ? 1 : -1;
  fld.census_ = equilibrium_census(sys);
  for (Side s : {Side::Right, Side::Left}) {
    SideData& d = s == Side::Right ? fld.right_ : fld.left_;
    const double det = d.A.det();
    const Vec2 e{-(d.A.a22 * d.b.x - d.A.a12 * d.b.y) / det, -(-d.A.a21 * d.b.x + d.A.a11 * d.b.y) / det};
    if (side_sign(s) * e.x >= -1e-12 * (1.0 + std::fabs(e.x))) d.eq.push_back(e);
  }
  return fld;
}

Vec2 SwitchedField::eval(Side s, Vec2 z) const {
  const SideData& d = side(s);
  if (d.linear) return d.A * z + d.b;
  return {lienard_->F(s, z.x) - z.y, lienard_->g(s, z.x)};
}

double SwitchedField::divergence(Side s, Vec2 z) const {
  const SideData& d = side(s);
  if (d.linear) return d.A.trace();
  return lienard_->f(s, z.x);
}

double SwitchedField::normal_velocity(Side s, double y) const {
  return (s == Side::Right ? a12_right_ : a12_left_) * (y - y_T_);
}

double SwitchedField::tangency_y_velocity(Side s) const { return eval(s, {0.0, y_T_}).y; }

double SwitchedField::fold_curvature(Side s) const {
  // At the fold x' = 0, so x'' = a12 y'.
  return (s == Side::Right ? a12_right_ : a12_left_) * tangency_y_velocity(s);
}

bool SwitchedField::fold_visible(Side s) const { return side_sign(s) * fold_curvature(s) > 0.0; }

std::optional<Side> SwitchedField::side_from_line(double y) const {
  const double v = sigma_ * (y - y_T_);
  if (v > 0.0) return Side::Right;
  if (v < 0.0) return Side::Left;
  if (fold_visible(Side::Right)) return Side::Right;
  if (fold_visible(Side::Left)) return Side::Left;
  return std::nullopt;
}

double SwitchedField::p_of(double x) const {
  if (!lienard_) return 0.0;
  return x >= 0.0 ? lienard_->F(Side::Right, x) : lienard_->F(Side::Left, x);
}

std::string_view to_string(SegmentEnd e) noexcept {
  switch (e) {
    case SegmentEnd::SwitchCrossing: return "switch-crossing";
    case SegmentEnd::Tangency: return "tangency";
    case SegmentEnd::EquilibriumApproach: return "equilibrium-approach";
    case SegmentEnd::Blowup: return "blowup";
    case SegmentEnd::TimeCap: return "time-cap";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// Gauss-Legendre, 3 nodes on [0, 1].
constexpr double gl_nodes[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double gl_weights[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};

}  // namespace

Integrator::Integrator(const SwitchedField& field, FlowOptions opts) : field_(&field), opts_(opts) {}

Vec2 Integrator::rhs(Side s, Vec2 z, double sign) const { return sign * field_->eval(s, z); }

bool Integrator::attempt(Side s, double sign, Step& st, double& err) const {
  const double h = st.h;
  const Vec2 z = st.z0;
  auto& k = st.k;
  k[1] = rhs(s, z + (h * a21) * k[0], sign);
  k[2] = rhs(s, z + h * (a31 * k[0] + a32 * k[1]), sign);
  k[3] = rhs(s, z + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]), sign);
  k[4] = rhs(s, z + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]), sign);
  k[5] = rhs(s, z + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]), sign);
  st.z1 = z + h * (a71 * k[0] + a73 * k[2] + a74 * k[3] + a75 * k[4] + a76 * k[5]);
  k[6] = rhs(s, st.z1, sign);
  const Vec2 e = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);
  const double sx = opts_.atol + opts_.rtol * std::max(std::fabs(z.x), std::fabs(st.z1.x));
  const double sy = opts_.atol + opts_.rtol * std::max(std::fabs(z.y), std::fabs(st.z1.y));
  err = std::sqrt(0.5 * ((e.x / sx) * (e.x / sx) + (e.y / sy) * (e.y / sy)));
  return std::isfinite(err) && err <= 1.0;
}

Vec2 Integrator::dense(const Step& st, double theta) {
  const auto& k = st.k;
  const Vec2 r1 = st.z0;
  const Vec2 r2 = st.z1 - st.z0;
  const Vec2 r3 = st.h * k[0] - r2;
  const Vec2 r4 = r2 - st.h * k[6] - r3;
  const Vec2 r5 = st.h * (d1 * k[0] + d3 * k[2] + d4 * k[3] + d5 * k[4] + d6 * k[5] + d7 * k[6]);
  const double u = 1.0 - theta;
  return r1 + theta * (r2 + u * (r3 + theta * (r4 + u * r5)));
}

void Integrator::accumulate(Side s, const Step& st, double theta_end, double sign, OrbitSegment& seg) const {
  const double span = theta_end * st.h;
  const bool with_p = field_->lienard() != nullptr;
  for (int i = 0; i < 3; ++i) {
    const Vec2 z = dense(st, gl_nodes[i] * theta_end);
    const double w = gl_weights[i] * span;
    seg.divergence_integral += sign * w * field_->divergence(s, z);
    if (with_p) seg.p_dy_integral += w * field_->p_of(z.x) * rhs(s, z, sign).y;
  }
}

OrbitSegment Integrator::segment(Side s, Vec2 start, Direction dir, double t0) {
  const double sign = dir == Direction::Forward ? 1.0 : -1.0;
  const double inside = side_sign(s);

  OrbitSegment seg;
  seg.side = s;
  seg.t0 = t0;
  seg.start = start;
  if (opts_.keep_samples) seg.samples.push_back({t0, start});

  // A linear focus whose equilibrium sits in this half plane maps each full
  // turn onto a copy scaled by exp(2 pi alpha / beta) about the equilibrium,
  // so an orbit that completes one turn without crossing never crosses.
  double trap_time = std::numeric_limits<double>::infinity();
  if (field_->is_linear(s) && !field_->equilibria(s).empty()) {
    const Mat2& A = field_->matrix(s);
    const double tr = A.trace();
    const double disc = tr * tr - 4.0 * A.det();
    if (disc < 0.0 && sign * tr <= 0.0) trap_time = 2.0 * std::numbers::pi / (0.5 * std::sqrt(-disc));
  }

  Step st;
  st.z0 = start;
  st.k[0] = rhs(s, start, sign);
  double tau = 0.0;
  const double vnorm = std::max(norm(st.k[0]), 1e-12);
  double h = std::clamp(0.01 * std::max(1.0, norm(start)) / vnorm, 1e-8, opts_.h_max);

  for (long n = 0;; ++n) {
    if (n >= opts_.max_steps || tau >= opts_.time_cap) {
      seg.end = SegmentEnd::TimeCap;
      break;
    }
    st.t = tau;
    st.h = std::min({h, opts_.h_max, opts_.time_cap - tau});
    double err = 0.0;
    while (!attempt(s, sign, st, err)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      st.h *= fac;
      if (st.h < 1e-14 * std::max(1.0, tau)) throw StepSizeUnderflow("step size underflow at t=" + std::to_string(t0 + sign * tau));
    }
    h = st.h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));

    if (inside * st.z1.x < 0.0) {
      // Bracket the crossing on the dense output, then re-step exactly.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside * dense(st, mid).x > 0.0) lo = mid;
        else hi = mid;
      }
      const double theta = 0.5 * (lo + hi);
      accumulate(s, st, theta, sign, seg);
      Step ev;
      ev.z0 = st.z0;
      ev.h = theta * st.h;
      ev.k[0] = st.k[0];
      double dummy = 0.0;
      (void)attempt(s, sign, ev, dummy);
      Vec2 z = ev.z1;
      double t_ev = tau + ev.h;
      for (int it = 0; it < 8 && std::fabs(z.x) > opts_.event_tol; ++it) {
        const Vec2 v = rhs(s, z, sign);
        if (v.x == 0.0) break;
        Step pol;
        pol.z0 = z;
        pol.h = -z.x / v.x;
        pol.k[0] = v;
        (void)attempt(s, sign, pol, dummy);
        z = pol.z1;
        t_ev += pol.h;
      }
      seg.event_residual = std::fabs(z.x);
      seg.end_point = z;
      seg.t1 = t0 + sign * t_ev;
      if (opts_.keep_samples) seg.samples.push_back({seg.t1, z});
      seg.end = std::fabs(z.y - field_->tangency_y()) <= opts_.tangency_tol ? SegmentEnd::Tangency
                                                                           : SegmentEnd::SwitchCrossing;
      return seg;
    }

    accumulate(s, st, 1.0, sign, seg);
    tau += st.h;
    if (opts_.keep_samples) seg.samples.push_back({t0 + sign * tau, st.z1});
    st.z0 = st.z1;
    st.k[0] = st.k[6];

    if (norm(st.z1) > opts_.state_cap) {
      seg.end = SegmentEnd::Blowup;
      break;
    }
    bool captured = tau >= trap_time;
    for (const Vec2& e : field_->equilibria(s)) {
      if (norm(st.z1 - e) < opts_.equilibrium_radius) captured = true;
    }
    if (captured) {
      seg.end = SegmentEnd::EquilibriumApproach;
      break;
    }
  }
  seg.end_point = st.z0;
  seg.t1 = t0 + sign * tau;
  if (opts_.keep_samples && (seg.samples.empty() || seg.samples.back().t != seg.t1)) {
    seg.samples.push_back({seg.t1, st.z0});
  }
  return seg;
}

// ---------------------------------------------------------------------------

std::vector<OrbitSegment> integrate(const SwitchedField& field, Vec2 start, Direction dir,
                                    const FlowOptions& opts, int max_segments) {
  for (const EquilibriumRecord& r : field.census().equilibria) {
    if (norm(start - r.location) <= opts.equilibrium_radius) {
      throw PreconditionError("start point is an equilibrium");
    }
  }
  std::optional<Side> side;
  if (std::fabs(start.x) <= opts.event_tol) start.x = 0.0;  // a located crossing
  if (start.x > 0.0) side = Side::Right;
  else if (start.x < 0.0) side = Side::Left;
  else {
    side = field.side_from_line(start.y);
    // Time reversal flips the crossing direction but not the fold curvature.
    if (side && dir == Direction::Backward && start.y != field.tangency_y()) side = opposite(*side);
  }
  if (!side) throw PreconditionError("orbit cannot leave the switching line at y=" + std::to_string(start.y));

  Integrator integ(field, opts);
  std::vector<OrbitSegment> out;
  Vec2 z = start;
  double t = 0.0;
  for (int i = 0; i < max_segments; ++i) {
    OrbitSegment seg = integ.segment(*side, z, dir, t);
    const SegmentEnd end = seg.end;
    z = {0.0, seg.end_point.y};
    t = seg.t1;
    out.push_back(std::move(seg));
    if (end == SegmentEnd::SwitchCrossing) {
      side = opposite(*side);
    } else if (end == SegmentEnd::Tangency) {
      if (!field.fold_visible(*side)) side = opposite(*side);
    } else {
      break;
    }
  }
  return out;
}

double lambda_gamma(const std::vector<OrbitSegment>& cycle) {
  if (cycle.empty()) throw NotClosed("empty orbit");
  const Vec2 gap = cycle.back().end_point - cycle.front().start;
  if (norm(gap) > 1e-6) throw NotClosed("orbit endpoints differ by " + std::to_string(norm(gap)));
  double lam = 0.0;
  for (const OrbitSegment& s : cycle) lam += s.divergence_integral;
  return lam;
}

void write_trajectory_csv(std::ostream& out, const std::vector<OrbitSegment>& segments) {
  out << "t,x,y,side\n";
  char buf[128];
  for (const OrbitSegment& s : segments) {
    for (const Sample& p : s.samples) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,", p.t, p.z.x, p.z.y);
      out << buf << to_string(s.side) << '\n';
    }
  }
}

}  // namespace crosscycle
