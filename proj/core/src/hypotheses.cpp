#include "crosscycle/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crosscycle/error.hpp"

namespace crosscycle {

namespace {

constexpr int kGrid = 4096;

bool nearly_equal(double a, double b, double rel = 1e-12) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Canonical systems satisfying H2 have closed-form inverse branches.
const CanonicalParams* closed_form(const LienardSpec& sys) {
  const auto& c = sys.canonical();
  if (c && c->tR > 0.0 && c->tL < 0.0) return &*c;
  return nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------
// PCoord

PCoord::PCoord(const LienardSpec& sys, double xmax)
    : sys_(&sys), xmax_(xmax), p_plus_(sys.F(Side::Right, xmax)), p_minus_(sys.F(Side::Left, -xmax)) {}

double PCoord::p(double x) const { return x >= 0.0 ? sys_->F(Side::Right, x) : sys_->F(Side::Left, x); }

std::optional<double> PCoord::x_plus(double p) const { return invert(Side::Right, p); }

std::optional<double> PCoord::x_minus(double p) const { return invert(Side::Left, p); }

std::optional<double> PCoord::invert(Side s, double p) const {
  if (p < 0.0) return std::nullopt;
  if (p == 0.0) return 0.0;
  if (const CanonicalParams* c = closed_form(*sys_)) {
    const double x = p / (s == Side::Right ? c->tR : c->tL);
    if (std::fabs(x) > xmax_) return std::nullopt;
    return x;
  }
  const double limit = s == Side::Right ? p_plus_ : p_minus_;
  if (p > limit) return std::nullopt;

  // Safeguarded Newton on F(x) = p over the bracket [0, +-xmax]; F' = f.
  const double dir = side_sign(s);
  double lo = 0.0, hi = xmax_;  // in |x|
  double u = std::clamp(p / std::max(std::fabs(sys_->f(s, 0.0)), 1e-300), 0.0, xmax_);
  if (!std::isfinite(u) || u <= 0.0) u = 0.5 * xmax_;
  for (int it = 0; it < 200; ++it) {
    const double r = sys_->F(s, dir * u) - p;
    if (r > 0.0) hi = u;
    else lo = u;
    if (r == 0.0) return dir * u;
    const double slope = dir * sys_->f(s, dir * u);  // dF/du
    double next = slope > 0.0 ? u - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - u) <= 1e-15 * std::max(u, 1e-300) || hi - lo <= 1e-15 * hi) {
      return dir * next;
    }
    u = next;
  }
  return dir * u;
}

double PCoord::phi(Side s, double p) const {
  const auto x = x_of(s, p);
  if (!x) return std::numeric_limits<double>::quiet_NaN();
  return sys_->g(s, *x) / sys_->f(s, *x);
}

// ---------------------------------------------------------------------------
// H1, H2

H1Result check_h1(const LienardSpec& sys, double xmax) {
  H1Result r;
  std::vector<double> xs(kGrid);
  std::vector<double> gs(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = xmax * static_cast<double>(i + 1) / kGrid;
    gs[i] = sys.g(Side::Right, xs[i]);
  }
  // Sign changes of g+ along the grid, counting exact zeros.
  int changes = 0;
  double root = 0.0;
  for (int i = 1; i < kGrid; ++i) {
    if ((gs[i - 1] < 0.0 && gs[i] >= 0.0) || (gs[i - 1] > 0.0 && gs[i] <= 0.0)) {
      ++changes;
      if (changes == 1) {
        double lo = xs[i - 1], hi = xs[i];
        const bool rising = gs[i - 1] < 0.0;
        if (gs[i] == 0.0) {
          lo = hi;
        }
        while (hi - lo > 1e-14 * std::max(1.0, hi)) {
          const double mid = 0.5 * (lo + hi);
          const double gm = sys.g(Side::Right, mid);
          if ((gm < 0.0) == rising && gm != 0.0) lo = mid;
          else hi = mid;
        }
        root = 0.5 * (lo + hi);
      }
    }
  }
  // g+ near 0+: a zero in (0, xs[0]) shows up as a negative first sample.
  double x_e = 0.0;
  if (changes == 0) {
    if (gs[0] > 0.0) {
      x_e = 0.0;
    } else {
      return r;  // g+ <= 0 on the whole range
    }
  } else if (changes == 1 && gs[0] < 0.0) {
    x_e = root;
  } else {
    return r;
  }
  for (int i = 0; i < kGrid; ++i) {
    if (std::fabs(xs[i] - x_e) <= 1e-9 * std::max(1.0, x_e)) continue;
    if (!(gs[i] * (xs[i] - x_e) > 0.0)) return r;
  }
  r.holds = true;
  r.x_e = x_e;
  return r;
}

bool check_h2(const LienardSpec& sys, double xmax) {
  for (int i = 1; i <= kGrid; ++i) {
    const double x = xmax * static_cast<double>(i) / kGrid;
    if (!(sys.f(Side::Right, x) > 0.0)) return false;
    if (!(sys.f(Side::Left, -x) < 0.0)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// H3

namespace {

double extrapolate_limit(const PCoord& pc, Side s) {
  std::vector<double> v;
  for (int k = 2; k <= 10; ++k) v.push_back(pc.phi(s, std::pow(10.0, -k)));
  // Linear Richardson step for ratio-10 sequences.
  std::vector<double> rich;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) rich.push_back((10.0 * v[i + 1] - v[i]) / 9.0);
  const double last = rich.back();
  const double prev = rich[rich.size() - 2];
  if (!std::isfinite(last) || std::fabs(last - prev) > 1e-6) {
    throw NonConvergent(std::string("phi") + (s == Side::Right ? "+" : "-") + " has no limit as p -> 0+");
  }
  return last;
}

}  // namespace

EtaLimits eta_limits(const LienardSpec& sys, double xmax) {
  if (const CanonicalParams* c = closed_form(sys)) return {-c->aR / c->tR, -c->aL / c->tL};
  const PCoord pc(sys, xmax);
  return {extrapolate_limit(pc, Side::Right), extrapolate_limit(pc, Side::Left)};
}

H3Result check_h3(const LienardSpec& sys, double xmax) {
  H3Result r;
  EtaLimits eta;
  try {
    eta = eta_limits(sys, xmax);
  } catch (const NonConvergent&) {
    return r;
  }
  r.converged = true;
  r.eta_plus = eta.eta_plus;
  r.eta_minus = eta.eta_minus;
  if (nearly_equal(eta.eta_plus, eta.eta_minus, 1e-9)) {
    r.equality_case = true;
    const PCoord pc(sys, xmax);
    r.holds = true;
    for (int k = 6; k >= 2; --k) {
      const double p = std::pow(10.0, -k);
      if (!(pc.phi(Side::Right, p) < pc.phi(Side::Left, p))) r.holds = false;
    }
    return r;
  }
  r.holds = eta.eta_plus < eta.eta_minus;
  return r;
}

// ---------------------------------------------------------------------------
// Star solutions

StarScan solve_star(const LienardSpec& sys, double pmax, double xmax, StarMethod method) {
  StarScan scan;
  scan.pmax = pmax;
  const CanonicalParams* c = closed_form(sys);
  if (method == StarMethod::ClosedForm && !c) throw PreconditionError("closed-form star solution needs canonical input");

  if (c && method != StarMethod::Generic) {
    const double kR = c->dR / (c->tR * c->tR);
    const double kL = c->dL / (c->tL * c->tL);
    const double r = c->aR / c->tR;
    const double l = c->aL / c->tL;
    // Lambda(p) = (kR - kL) p - (r - l)
    if (nearly_equal(kR, kL)) {
      if (nearly_equal(r, l)) scan.lambda_identically_zero = true;
      else scan.lambda_sup = std::fabs(r - l);
      return scan;
    }
    const double p = (r - l) / (kR - kL);
    scan.lambda_sup = std::max(std::fabs(r - l), std::fabs((kR - kL) * pmax - (r - l)));
    if (p > 0.0 && p <= pmax) scan.roots.push_back({p / c->tL, p / c->tR, p});
    return scan;
  }

  const PCoord pc(sys, xmax);
  auto lam = [&](double p) { return pc.lambda(p); };
  std::vector<double> ps(kGrid + 1);
  std::vector<double> vs(kGrid + 1);
  double sup = 0.0;
  for (int i = 1; i <= kGrid; ++i) {
    ps[i] = pmax * static_cast<double>(i) / kGrid;
    vs[i] = lam(ps[i]);
    if (std::isfinite(vs[i])) sup = std::max(sup, std::fabs(vs[i]));
  }
  scan.lambda_sup = sup;
  if (sup <= 1e-8) {
    scan.lambda_identically_zero = true;
    return scan;
  }
  auto push_root = [&](double p) {
    const auto xp = pc.x_plus(p);
    const auto xm = pc.x_minus(p);
    if (xp && xm) scan.roots.push_back({*xm, *xp, p});
  };
  // The first sample is compared against the sign of Lambda near 0+.
  ps[0] = pmax * 1e-9;
  vs[0] = lam(ps[0]);
  for (int i = 1; i <= kGrid; ++i) {
    if (vs[i] == 0.0) {
      push_root(ps[i]);
      continue;
    }
    if (!std::isfinite(vs[i]) || !std::isfinite(vs[i - 1]) || vs[i - 1] == 0.0) continue;
    if ((vs[i] > 0.0) == (vs[i - 1] > 0.0)) continue;
    double lo = ps[i - 1], hi = ps[i];
    double flo = vs[i - 1];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = lam(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    push_root(0.5 * (lo + hi));
  }
  return scan;
}

// ---------------------------------------------------------------------------
// H4, H5

CheckResult check_h4(const LienardSpec& sys, double x_star_plus, double x_e, double xmax) {
  CheckResult r;
  if (x_star_plus < x_e || x_star_plus >= xmax) return r;
  double prev_h = 0.0;
  double prev_g = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kGrid; ++i) {
    const double x = x_star_plus + (xmax - x_star_plus) * static_cast<double>(i) / kGrid;
    const double g = sys.g(Side::Right, x);
    if (g == 0.0 || (i > 1 && (g > 0.0) != (prev_g > 0.0))) return r;  // singular quotient
    const double h = sys.F(Side::Right, x) * sys.f(Side::Right, x) / g;
    if (i > 1) margin = std::min(margin, h - prev_h);
    prev_h = h;
    prev_g = g;
  }
  r.checked = true;
  r.margin = margin;
  r.holds = margin > 0.0;
  return r;
}

double k_function(const LienardSpec& sys, Side s, double x) {
  const double f = sys.f(s, x);
  return (sys.dg(s, x) * f - sys.df(s, x) * sys.g(s, x)) / (f * f * f);
}

CheckResult check_h5(const LienardSpec& sys, double p_star, double pmax, double xmax) {
  CheckResult r;
  if (const CanonicalParams* c = closed_form(sys)) {
    const double kR = c->dR / (c->tR * c->tR);
    const double kL = c->dL / (c->tL * c->tL);
    r.checked = true;
    r.margin = kR - kL;
    r.holds = kR - kL > 1e-12 * std::max(std::fabs(kR), std::fabs(kL));
    return r;
  }
  if (!(pmax > p_star)) return r;
  constexpr int kN = 256;
  const PCoord pc(sys, xmax);
  std::vector<double> kplus(kN);
  std::vector<double> kminus(kN);
  for (int i = 0; i < kN; ++i) {
    const double p = p_star + (pmax - p_star) * static_cast<double>(i) / (kN - 1);
    const auto xp = pc.x_plus(p);
    const auto xm = pc.x_minus(p);
    if (!xp || !xm) return r;
    kplus[i] = k_function(sys, Side::Right, *xp);
    kminus[i] = k_function(sys, Side::Left, *xm);
  }
  // For each p1 the worst p2 >= p1 is the suffix maximum of K-.
  double suffix_max = -std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  for (int i = kN - 1; i >= 0; --i) {
    suffix_max = std::max(suffix_max, kminus[i]);
    margin = std::min(margin, kplus[i] - suffix_max);
  }
  r.checked = true;
  r.margin = margin;
  r.holds = margin > 0.0;
  return r;
}

std::function<double(double)> lambda_fn(const LienardSpec& sys, double xmax) {
  if (const CanonicalParams* c = closed_form(sys)) {
    const double kR = c->dR / (c->tR * c->tR);
    const double kL = c->dL / (c->tL * c->tL);
    const double offset = c->aR / c->tR - c->aL / c->tL;
    return [kR, kL, offset](double p) { return (kR - kL) * p - offset; };
  }
  return [pc = PCoord(sys, xmax)](double p) { return pc.lambda(p); };
}

HypothesisReport hypothesis_report(const LienardSpec& sys, double xmax) {
  HypothesisReport rep;
  rep.xmax = xmax;
  rep.h1 = check_h1(sys, xmax);
  rep.h2 = check_h2(sys, xmax);
  if (!rep.h2) {
    rep.notes.push_back("H2 fails: p(x) is not monotone on each side; H3-H5 and star solutions skipped");
    return rep;
  }
  const PCoord pc(sys, xmax);
  rep.pmax = pc.pmax();
  rep.h3 = check_h3(sys, xmax);
  if (rep.h3.equality_case) {
    rep.notes.push_back("H3 equality case checked for p in [1e-6, 1e-2] only");
  }
  rep.star = solve_star(sys, rep.pmax, xmax);
  rep.unique_star = rep.star.roots.size() == 1 && !rep.star.lambda_identically_zero;
  std::ostringstream note;
  note << "star solutions scanned on (0, " << rep.pmax << "]; beyond is unexplored";
  rep.notes.push_back(note.str());
  if (rep.unique_star) {
    const StarSolution& s = rep.star.roots.front();
    if (rep.h1.holds) rep.h4 = check_h4(sys, s.x_plus, rep.h1.x_e, xmax);
    rep.h5 = check_h5(sys, s.p, rep.pmax, xmax);
  }
  return rep;
}

}  // namespace crosscycle
