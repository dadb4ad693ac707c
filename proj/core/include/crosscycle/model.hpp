#pragma once

// Domain types shared by the analysis modules.
//
// A nonsmooth Lienard system is
//
//   (x', y') = (F+(x) - y, g+(x))   for x > 0
//   (x', y') = (F-(x) - y, g-(x))   for x < 0,      F(x) = int_0^x f(s) ds,
//
// and a piecewise-linear Filippov system is z' = A+- z + b+- on the two sides
// of the switching line x = 0.

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crosscycle/expr.hpp"
#include "crosscycle/geometry.hpp"

namespace crosscycle {

/// F(x) = int_0^x f(s) ds by adaptive Simpson quadrature on memoized unit
/// panels. Thread-safe; copies share the panel cache.
class Antiderivative {
 public:
  explicit Antiderivative(Expr integrand, double abs_tol = 1e-10);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] const Expr& integrand() const noexcept { return integrand_; }

 private:
  struct Cache;

  Expr integrand_;
  double abs_tol_;
  std::shared_ptr<Cache> cache_;
};

/// Liénard canonical parameters: traces, determinants and offsets.
struct CanonicalParams {
  double tR = 0.0, tL = 0.0;
  double dR = 0.0, dL = 0.0;
  double aR = 0.0, aL = 0.0;
  double b = 0.0;

  friend bool operator==(const CanonicalParams&, const CanonicalParams&) = default;
};

/// The four branch functions of a nonsmooth Liénard system.
class LienardSpec {
 public:
  struct Branch {
    Expr f;
    Expr g;
    std::optional<Expr> F;  ///< closed-form antiderivative of f; quadrature if absent
  };

  LienardSpec(Branch right, Branch left, ParamMap params = {});

  /// Closed-form system built from canonical parameters (b must be zero).
  static LienardSpec from_canonical(const CanonicalParams& c);

  [[nodiscard]] double f(Side s, double x) const { return side(s).f.eval(x); }
  [[nodiscard]] double g(Side s, double x) const { return side(s).g.eval(x); }
  [[nodiscard]] double df(Side s, double x) const { return side(s).df.eval(x); }
  [[nodiscard]] double dg(Side s, double x) const { return side(s).dg.eval(x); }
  [[nodiscard]] double F(Side s, double x) const;

  [[nodiscard]] const Expr& f_expr(Side s) const { return side(s).f; }
  [[nodiscard]] const Expr& g_expr(Side s) const { return side(s).g; }
  [[nodiscard]] std::optional<Expr> F_expr(Side s) const { return side(s).F; }

  [[nodiscard]] const ParamMap& params() const noexcept { return params_; }

  /// Set when the system came from canonical PWL parameters; enables the
  /// closed-form paths (x+-(p) = p/t, 2x2 star system, constant K+-).
  [[nodiscard]] const std::optional<CanonicalParams>& canonical() const noexcept { return canonical_; }

 private:
  struct BranchData {
    Expr f, g, df, dg;
    std::optional<Expr> F;
    std::optional<Antiderivative> quad;
  };

  [[nodiscard]] const BranchData& side(Side s) const { return s == Side::Right ? right_ : left_; }

  BranchData right_;
  BranchData left_;
  ParamMap params_;
  std::optional<CanonicalParams> canonical_;
};

/// z' = A z + b on each side of x = 0. Nondegenerate: |det A+-| > 1e-12.
struct PwlSpec {
  Mat2 A_plus;
  Vec2 b_plus;
  Mat2 A_minus;
  Vec2 b_minus;

  /// Throws DegenerateSystem when either determinant vanishes.
  void validate() const;
};

enum class SwitchKind {
  CrossingUp,    ///< y < 0: orbit moves from the left to the right side
  CrossingDown,  ///< y > 0: orbit moves from the right to the left side
  BoundaryEquilibrium,
  PseudoEquilibrium,
  FoldFoldRegular,
};

struct SwitchPointClass {
  SwitchKind kind = SwitchKind::CrossingUp;
  bool right_visible = false;  ///< meaningful for FoldFoldRegular
  bool left_visible = false;
};

[[nodiscard]] std::string_view to_string(SwitchKind k) noexcept;

enum class EquilibriumKind { RegularLeft, RegularRight, Boundary, Pseudo };
enum class LinearType { Focus, Node, Saddle, Center, None };
enum class Stability { Stable, Unstable, Neutral, None };

[[nodiscard]] std::string_view to_string(EquilibriumKind k) noexcept;
[[nodiscard]] std::string_view to_string(LinearType t) noexcept;
[[nodiscard]] std::string_view to_string(Stability s) noexcept;

struct EquilibriumRecord {
  Vec2 location;
  EquilibriumKind kind = EquilibriumKind::Boundary;
  LinearType type = LinearType::None;
  Stability stability = Stability::None;
};

/// Linear type of a planar equilibrium with Jacobian trace `tr` and determinant `det`.
[[nodiscard]] std::pair<LinearType, Stability> classify_linear(double tr, double det);

struct Region {
  double xmin = -100.0, xmax = 100.0;
  double ymin = -std::numeric_limits<double>::infinity();
  double ymax = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool contains(Vec2 p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

struct Census {
  std::vector<EquilibriumRecord> equilibria;
  /// Zeros of a side's field lying in the other half plane; not equilibria
  /// of the Filippov system.
  std::vector<EquilibriumRecord> virtual_equilibria;
};

[[nodiscard]] SwitchPointClass classify_switch_point(const LienardSpec& sys, double y);

/// Regular equilibria by a 2048-sample sign scan of g+- per half axis plus
/// bisection, and the origin when it is a boundary or pseudo-equilibrium.
[[nodiscard]] Census equilibrium_census(const LienardSpec& sys, const Region& region = {});

[[nodiscard]] Census equilibrium_census(const PwlSpec& sys);

/// A located crossing periodic orbit.
struct CycleRecord {
  double y_B = 0.0;  ///< ordinate where the orbit leaves the right side
  double y_D = 0.0;  ///< ordinate where the orbit enters the right side
  double period = 0.0;
  double right_time = 0.0;
  double left_time = 0.0;
  double lambda_gamma = 0.0;
  double map_derivative = 0.0;
  double fixed_point_residual = 0.0;
  double area_plus = 0.0;  ///< S(Omega+) in the (p, y) plane (Lienard input only)
  double area_minus = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<EquilibriumRecord> enclosed;
  std::vector<Vec2> polyline;
};

enum class VerdictKind {
  NoCrossingCycles,
  AtMostOne,  ///< uniqueness holds but the theorems used fix no stability
  AtMostOneStable,
  AtMostOneUnstable,
  Annulus,
  Inconclusive,
};

[[nodiscard]] std::string_view to_string(VerdictKind k) noexcept;

struct Evidence {
  std::string condition;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::string reason;
  std::vector<Evidence> evidence;
};

}  // namespace crosscycle
