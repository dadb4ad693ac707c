#pragma once

// Hypotheses H1-H5 for nonsmooth Liénard systems and the p-coordinate
// machinery behind them.
//
// Under H2, p(x) = F+(x) for x >= 0 and F-(x) for x < 0 is non-negative with
// inverse branches x+(p) (increasing) and x-(p) (decreasing). In the
// (p, y) plane each side obeys dy/dp = phi+-(p) / (p - y) with
// phi+-(p) = g+-(x+-(p)) / f+-(x+-(p)), and Lambda(p) = phi+(p) - phi-(p).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crosscycle/model.hpp"

namespace crosscycle {

class PCoord {
 public:
  /// The inverse branches are explored on [-xmax, xmax].
  explicit PCoord(const LienardSpec& sys, double xmax = 100.0);

  [[nodiscard]] double p(double x) const;
  /// x+(p) on [0, F+(xmax)]; nullopt outside the explored range.
  [[nodiscard]] std::optional<double> x_plus(double p) const;
  /// x-(p) on [0, F-(-xmax)]; nullopt outside the explored range.
  [[nodiscard]] std::optional<double> x_minus(double p) const;
  [[nodiscard]] std::optional<double> x_of(Side s, double p) const {
    return s == Side::Right ? x_plus(p) : x_minus(p);
  }

  /// Explored range limits F+(xmax) and F-(-xmax).
  [[nodiscard]] double p_plus() const noexcept { return p_plus_; }
  [[nodiscard]] double p_minus() const noexcept { return p_minus_; }
  [[nodiscard]] double pmax() const noexcept { return std::min(p_plus_, p_minus_); }
  [[nodiscard]] double xmax() const noexcept { return xmax_; }

  /// g/f evaluated at x+-(p).
  [[nodiscard]] double phi(Side s, double p) const;
  [[nodiscard]] double lambda(double p) const { return phi(Side::Right, p) - phi(Side::Left, p); }

  [[nodiscard]] const LienardSpec& system() const noexcept { return *sys_; }

 private:
  [[nodiscard]] std::optional<double> invert(Side s, double p) const;

  const LienardSpec* sys_;
  double xmax_;
  double p_plus_;
  double p_minus_;
};

struct H1Result {
  bool holds = false;
  double x_e = 0.0;
};

struct EtaLimits {
  double eta_plus = 0.0;
  double eta_minus = 0.0;
};

struct H3Result {
  bool holds = false;
  bool converged = false;
  bool equality_case = false;  ///< eta+ = eta-; holds needs phi+ < phi- on p in [1e-6, 1e-2]
  double eta_plus = 0.0;
  double eta_minus = 0.0;
};

struct CheckResult {
  bool checked = false;
  bool holds = false;
  double margin = 0.0;  ///< smallest slack found by the grid test
};

struct StarSolution {
  double x_minus = 0.0;
  double x_plus = 0.0;
  double p = 0.0;
};

struct StarScan {
  std::vector<StarSolution> roots;
  bool lambda_identically_zero = false;  ///< sup |Lambda| <= 1e-8 on the scanned range
  double lambda_sup = 0.0;
  double pmax = 0.0;  ///< upper end of the scanned interval (0, pmax]
};

enum class StarMethod { Auto, Generic, ClosedForm };

struct HypothesisReport {
  double xmax = 100.0;
  double pmax = 0.0;
  H1Result h1;
  bool h2 = false;
  H3Result h3;
  CheckResult h4;
  CheckResult h5;
  StarScan star;
  bool unique_star = false;
  std::vector<std::string> notes;
};

/// g+(x)(x - x_e) > 0 for x in (0, xmax], x != x_e, on a 4096-point grid.
[[nodiscard]] H1Result check_h1(const LienardSpec& sys, double xmax);

/// f+ > 0 on (0, xmax] and f- < 0 on [-xmax, 0), on a 4096-point grid.
[[nodiscard]] bool check_h2(const LienardSpec& sys, double xmax);

/// Limits of phi+-(p) as p -> 0+, by Richardson extrapolation along p = 10^-k,
/// k = 2..10. Throws NonConvergent.
[[nodiscard]] EtaLimits eta_limits(const LienardSpec& sys, double xmax = 100.0);

[[nodiscard]] H3Result check_h3(const LienardSpec& sys, double xmax = 100.0);

/// Roots of Lambda on (0, pmax]. Canonical systems use the closed-form 2x2
/// system t_L x- = t_R x+, (d_L x- - a_L)/t_L = (d_R x+ - a_R)/t_R unless
/// `method` forces the generic sign scan.
[[nodiscard]] StarScan solve_star(const LienardSpec& sys, double pmax, double xmax = 100.0,
                                  StarMethod method = StarMethod::Auto);

/// x+* >= x_e and F+ f+ / g+ increasing on (x+*, xmax].
[[nodiscard]] CheckResult check_h4(const LienardSpec& sys, double x_star_plus, double x_e, double xmax);

/// K-(x-(p2)) < K+(x+(p1)) for p2 > p1 >= p*; 256x256 grid, or d_L/t_L^2 <
/// d_R/t_R^2 for canonical systems.
[[nodiscard]] CheckResult check_h5(const LienardSpec& sys, double p_star, double pmax, double xmax = 100.0);

/// K(x) = (g' f - f' g) / f^3 on one side.
[[nodiscard]] double k_function(const LienardSpec& sys, Side s, double x);

/// Lambda(p) = phi+(p) - phi-(p).
[[nodiscard]] std::function<double(double)> lambda_fn(const LienardSpec& sys, double xmax = 100.0);

[[nodiscard]] HypothesisReport hypothesis_report(const LienardSpec& sys, double xmax = 100.0);

}  // namespace crosscycle
