#include "crosscycle/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "crosscycle/error.hpp"

namespace crosscycle {

// ---------------------------------------------------------------------------
// Antiderivative

namespace {

constexpr double kPanelWidth = 0.5;
constexpr std::size_t kUniformPanels = 128;  // uniform up to |x| = 64, doubling beyond

double node_abscissa(std::size_t k) {
  if (k <= kUniformPanels) return kPanelWidth * static_cast<double>(k);
  return kPanelWidth * kUniformPanels * std::ldexp(1.0, static_cast<int>(k - kUniformPanels));
}

std::size_t node_below(double ax) {
  const double uniform_end = kPanelWidth * kUniformPanels;
  if (ax < uniform_end) return static_cast<std::size_t>(std::floor(ax / kPanelWidth));
  return kUniformPanels + static_cast<std::size_t>(std::floor(std::log2(ax / uniform_end)));
}

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const Expr& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f.eval(lm);
  const double frm = f.eval(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  // Far from the origin F is large and only its relative accuracy matters.
  const double floor = 1e-14 * (std::fabs(left) + std::fabs(right));
  if (depth <= 0 || std::fabs(delta) <= 15.0 * std::max(tol, floor)) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const Expr& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f.eval(a);
  const double fb = f.eval(b);
  const double fm = f.eval(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 40);
}

}  // namespace

struct Antiderivative::Cache {
  std::mutex mutex;
  std::vector<double> positive{0.0};  // F(node_abscissa(k))
  std::vector<double> negative{0.0};  // F(-node_abscissa(k))
};

Antiderivative::Antiderivative(Expr integrand, double abs_tol)
    : integrand_(std::move(integrand)), abs_tol_(abs_tol), cache_(std::make_shared<Cache>()) {}

double Antiderivative::operator()(double x) const {
  if (x == 0.0) return 0.0;
  if (!std::isfinite(x)) throw DomainError("antiderivative at non-finite abscissa");
  const double dir = x > 0.0 ? 1.0 : -1.0;
  const std::size_t k = node_below(std::fabs(x));
  const double panel_tol = abs_tol_ * 1e-2;
  double node_value = 0.0;
  {
    std::lock_guard lock(cache_->mutex);
    auto& nodes = dir > 0.0 ? cache_->positive : cache_->negative;
    while (nodes.size() <= k) {
      const std::size_t j = nodes.size() - 1;
      nodes.push_back(nodes.back() + integrate(integrand_, dir * node_abscissa(j), dir * node_abscissa(j + 1), panel_tol));
    }
    node_value = nodes[k];
  }
  return node_value + integrate(integrand_, dir * node_abscissa(k), x, panel_tol);
}

// ---------------------------------------------------------------------------
// LienardSpec

LienardSpec::LienardSpec(Branch right, Branch left, ParamMap params) : params_(std::move(params)) {
  auto build = [this](Branch& b) {
    BranchData d;
    d.f = crosscycle::bind(b.f, params_);
    d.g = crosscycle::bind(b.g, params_);
    for (const Expr* e : {&d.f, &d.g}) {
      if (auto names = e->parameters(); !names.empty()) throw UnboundParameter(*names.begin());
    }
    d.df = differentiate(d.f);
    d.dg = differentiate(d.g);
    if (b.F) {
      d.F = crosscycle::bind(*b.F, params_);
      if (auto names = d.F->parameters(); !names.empty()) throw UnboundParameter(*names.begin());
      if (std::fabs(d.F->eval(0.0)) > 1e-12) throw PreconditionError("F(0) must vanish");
    } else {
      d.quad.emplace(d.f);
    }
    return d;
  };
  right_ = build(right);
  left_ = build(left);
}

LienardSpec LienardSpec::from_canonical(const CanonicalParams& c) {
  const Expr x = Expr::variable();
  auto lit = [](double v) { return Expr::literal(v); };
  Branch right{lit(c.tR), lit(c.dR) * x - lit(c.aR), lit(c.tR) * x};
  Branch left{lit(c.tL), lit(c.dL) * x - lit(c.aL), lit(c.tL) * x};
  LienardSpec spec(std::move(right), std::move(left));
  spec.canonical_ = c;
  return spec;
}

double LienardSpec::F(Side s, double x) const {
  const BranchData& d = side(s);
  if (d.F) return d.F->eval(x);
  return (*d.quad)(x);
}

// ---------------------------------------------------------------------------
// PwlSpec

void PwlSpec::validate() const {
  if (std::fabs(A_plus.det()) <= 1e-12) throw DegenerateSystem("det A+ vanishes");
  if (std::fabs(A_minus.det()) <= 1e-12) throw DegenerateSystem("det A- vanishes");
}

// ---------------------------------------------------------------------------
// Classification

std::pair<LinearType, Stability> classify_linear(double tr, double det) {
  if (det < 0.0) return {LinearType::Saddle, Stability::Unstable};
  const Stability st = tr < 0.0 ? Stability::Stable : (tr > 0.0 ? Stability::Unstable : Stability::Neutral);
  if (tr * tr - 4.0 * det < 0.0) {
    if (tr == 0.0) return {LinearType::Center, Stability::Neutral};
    return {LinearType::Focus, st};
  }
  return {LinearType::Node, st};
}

namespace {

SwitchPointClass classify_origin(double g_right, double g_left) {
  SwitchPointClass c;
  const double prod = g_right * g_left;
  if (prod == 0.0) {
    c.kind = SwitchKind::BoundaryEquilibrium;
  } else if (prod < 0.0) {
    c.kind = SwitchKind::PseudoEquilibrium;
  } else {
    // x'' = -g at the origin: visible on the right when it bends back into x > 0.
    c.kind = SwitchKind::FoldFoldRegular;
    c.right_visible = g_right < 0.0;
    c.left_visible = g_left > 0.0;
  }
  return c;
}

double safe_eval(const LienardSpec& sys, Side s, double x) {
  try {
    return sys.g(s, x);
  } catch (const Error&) {
    return std::nan("");
  }
}

// Zeros of g on the sampled interval [a, b] (a < b), excluding x == exclude.
std::vector<double> scan_zeros(const LienardSpec& sys, Side s, double a, double b, double exclude) {
  constexpr int kSamples = 2048;
  std::vector<double> roots;
  double x_prev = a;
  double v_prev = safe_eval(sys, s, a);
  if (v_prev == 0.0 && a != exclude) roots.push_back(a);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / kSamples;
    const double v = safe_eval(sys, s, x);
    if (v == 0.0) {
      if (x != exclude) roots.push_back(x);
    } else if (std::isfinite(v) && std::isfinite(v_prev) && v_prev != 0.0 && (v > 0.0) != (v_prev > 0.0)) {
      double lo = x_prev, hi = x;
      double flo = v_prev;
      while (hi - lo > 1e-12 * std::max(1.0, std::fabs(lo))) {
        const double mid = 0.5 * (lo + hi);
        const double fm = safe_eval(sys, s, mid);
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
      const double root = 0.5 * (lo + hi);
      if (root != exclude) roots.push_back(root);
    }
    x_prev = x;
    v_prev = v;
  }
  return roots;
}

EquilibriumRecord regular_record(const LienardSpec& sys, Side s, double xe, EquilibriumKind kind) {
  EquilibriumRecord r;
  r.location = {xe, sys.F(s, xe)};
  r.kind = kind;
  // Jacobian of (F(x) - y, g(x)) is [[f, -1], [g', 0]].
  std::tie(r.type, r.stability) = classify_linear(sys.f(s, xe), sys.dg(s, xe));
  return r;
}

}  // namespace

SwitchPointClass classify_switch_point(const LienardSpec& sys, double y) {
  if (y > 0.0) return {SwitchKind::CrossingDown};
  if (y < 0.0) return {SwitchKind::CrossingUp};
  return classify_origin(sys.g(Side::Right, 0.0), sys.g(Side::Left, 0.0));
}

Census equilibrium_census(const LienardSpec& sys, const Region& region) {
  Census census;
  auto add = [&](std::vector<EquilibriumRecord>& into, const EquilibriumRecord& r) {
    if (region.contains(r.location)) into.push_back(r);
  };

  if (region.xmax > 0.0) {
    for (double xe : scan_zeros(sys, Side::Right, 0.0, region.xmax, 0.0)) {
      add(census.equilibria, regular_record(sys, Side::Right, xe, EquilibriumKind::RegularRight));
    }
    for (double xe : scan_zeros(sys, Side::Left, 0.0, region.xmax, 0.0)) {
      add(census.virtual_equilibria, regular_record(sys, Side::Left, xe, EquilibriumKind::RegularLeft));
    }
  }
  if (region.xmin < 0.0) {
    for (double xe : scan_zeros(sys, Side::Left, region.xmin, 0.0, 0.0)) {
      add(census.equilibria, regular_record(sys, Side::Left, xe, EquilibriumKind::RegularLeft));
    }
    for (double xe : scan_zeros(sys, Side::Right, region.xmin, 0.0, 0.0)) {
      add(census.virtual_equilibria, regular_record(sys, Side::Right, xe, EquilibriumKind::RegularRight));
    }
  }

  const SwitchPointClass origin = classify_switch_point(sys, 0.0);
  if (origin.kind == SwitchKind::BoundaryEquilibrium || origin.kind == SwitchKind::PseudoEquilibrium) {
    EquilibriumRecord r;
    r.location = {0.0, 0.0};
    r.kind = origin.kind == SwitchKind::BoundaryEquilibrium ? EquilibriumKind::Boundary : EquilibriumKind::Pseudo;
    add(census.equilibria, r);
  }
  return census;
}

Census equilibrium_census(const PwlSpec& sys) {
  constexpr double kOnLine = 1e-12;
  Census census;
  auto side_eq = [&](const Mat2& A, Vec2 b, Side s) {
    const double det = A.det();
    const Vec2 z{-(A.a22 * b.x - A.a12 * b.y) / det, -(-A.a21 * b.x + A.a11 * b.y) / det};
    EquilibriumRecord r;
    r.location = z;
    std::tie(r.type, r.stability) = classify_linear(A.trace(), det);
    if (std::fabs(z.x) <= kOnLine * (1.0 + std::fabs(z.y))) {
      r.location.x = 0.0;
      r.kind = EquilibriumKind::Boundary;
      r.type = LinearType::None;
      r.stability = Stability::None;
      census.equilibria.push_back(r);
      return;
    }
    r.kind = s == Side::Right ? EquilibriumKind::RegularRight : EquilibriumKind::RegularLeft;
    const bool real = (s == Side::Right) == (z.x > 0.0);
    (real ? census.equilibria : census.virtual_equilibria).push_back(r);
  };
  side_eq(sys.A_plus, sys.b_plus, Side::Right);
  side_eq(sys.A_minus, sys.b_minus, Side::Left);

  // Tangency point of the switching line: x' = a12 y + b1 vanishes.
  if (sys.A_plus.a12 != 0.0) {
    const double yT = -sys.b_plus.x / sys.A_plus.a12;
    const double vR = sys.A_plus.a22 * yT + sys.b_plus.y;
    const double vL = sys.A_minus.a22 * yT + sys.b_minus.y;
    const double uL = sys.A_minus.a12 * yT + sys.b_minus.x;
    const bool already = std::any_of(census.equilibria.begin(), census.equilibria.end(), [](const auto& e) {
      return e.kind == EquilibriumKind::Boundary;
    });
    const double scale = kOnLine * (1.0 + std::fabs(yT));
    const bool touches = std::fabs(vR) <= scale || std::fabs(vL) <= scale;
    if (std::fabs(uL) <= scale && !already) {
      if (touches || vR * vL < 0.0) {
        EquilibriumRecord r;
        r.location = {0.0, yT};
        r.kind = touches ? EquilibriumKind::Boundary : EquilibriumKind::Pseudo;
        census.equilibria.push_back(r);
      }
    }
  }
  return census;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SwitchKind k) noexcept {
  switch (k) {
    case SwitchKind::CrossingUp: return "CrossingUp";
    case SwitchKind::CrossingDown: return "CrossingDown";
    case SwitchKind::BoundaryEquilibrium: return "BoundaryEquilibrium";
    case SwitchKind::PseudoEquilibrium: return "PseudoEquilibrium";
    case SwitchKind::FoldFoldRegular: return "FoldFoldRegular";
  }
  return "?";
}

std::string_view to_string(EquilibriumKind k) noexcept {
  switch (k) {
    case EquilibriumKind::RegularLeft: return "RegularLeft";
    case EquilibriumKind::RegularRight: return "RegularRight";
    case EquilibriumKind::Boundary: return "Boundary";
    case EquilibriumKind::Pseudo: return "Pseudo";
  }
  return "?";
}

std::string_view to_string(LinearType t) noexcept {
  switch (t) {
    case LinearType::Focus: return "focus";
    case LinearType::Node: return "node";
    case LinearType::Saddle: return "saddle";
    case LinearType::Center: return "center";
    case LinearType::None: return "none";
  }
  return "?";
}

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Neutral: return "neutral";
    case Stability::None: return "none";
  }
  return "?";
}

std::string_view to_string(VerdictKind k) noexcept {
  switch (k) {
    case VerdictKind::NoCrossingCycles: return "NoCrossingCycles";
    case VerdictKind::AtMostOne: return "AtMostOne";
    case VerdictKind::AtMostOneStable: return "AtMostOneStable";
    case VerdictKind::AtMostOneUnstable: return "AtMostOneUnstable";
    case VerdictKind::Annulus: return "Annulus";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

}  // namespace crosscycle
