#pragma once

// Half-return maps on the switching line and crossing-cycle location.
//
// P_R carries an ordinate where orbits enter the right side to the ordinate
// where they leave it; P_L does the same for the left side, and
// P = P_L o P_R. Fixed points of P are crossing periodic orbits.

#include <iosfwd>
#include <optional>
#include <vector>

#include "crosscycle/flow.hpp"

namespace crosscycle {

enum class MapStatus { Ok, NoReturn, BelowThreshold, WrongDirection };

[[nodiscard]] std::string_view to_string(MapStatus s) noexcept;

struct HalfMapResult {
  MapStatus status = MapStatus::NoReturn;
  double value = 0.0;
  double flight_time = 0.0;
  double divergence_integral = 0.0;
  double p_dy_integral = 0.0;
  OrbitSegment orbit;

  [[nodiscard]] bool ok() const noexcept { return status == MapStatus::Ok; }
};

struct ReturnResult {
  MapStatus status = MapStatus::NoReturn;
  double value = 0.0;
  HalfMapResult right;
  HalfMapResult left;

  [[nodiscard]] bool ok() const noexcept { return status == MapStatus::Ok; }
};

class ReturnMaps {
 public:
  explicit ReturnMaps(SwitchedField field, FlowOptions opts = {});

  /// y0 must satisfy entry_sign() * (y0 - y_T) >= 0.
  [[nodiscard]] HalfMapResult right(double y0) const;
  /// BelowThreshold when z0 lies strictly between y_T and the left threshold.
  [[nodiscard]] HalfMapResult left(double z0) const;
  [[nodiscard]] ReturnResult composed(double y0) const;

  /// Least-distance left entry ordinate whose orbit returns: the backward
  /// image of the tangency point when the left fold is visible, else y_T.
  [[nodiscard]] double left_threshold() const noexcept { return z_hat_; }

  [[nodiscard]] const SwitchedField& field() const noexcept { return field_; }
  [[nodiscard]] const FlowOptions& options() const noexcept { return opts_; }
  [[nodiscard]] ReturnMaps with_options(FlowOptions opts) const;

 private:
  ReturnMaps(SwitchedField field, FlowOptions opts, double z_hat);
  [[nodiscard]] HalfMapResult run(Side s, double y0) const;

  SwitchedField field_;
  FlowOptions opts_;
  double z_hat_ = 0.0;
};

[[nodiscard]] HalfMapResult half_map_right(const LienardSpec& sys, double y0, const FlowOptions& opts = {});
[[nodiscard]] HalfMapResult half_map_left(const LienardSpec& sys, double z0, const FlowOptions& opts = {});

/// Closed-form half map of a linear focus side x' = t x - y, y' = d x - a:
/// with alpha = t/2, beta = sqrt(d - t^2/4) and x_e = a/d, an orbit entering
/// at ordinate entry(tau) leaves after time tau at exit(tau), where
///
///   entry(tau) = alpha x_e + beta x_e (exp(-alpha tau) - cos(beta tau)) / sin(beta tau)
///   exit(tau)  = alpha x_e - beta x_e (exp( alpha tau) - cos(beta tau)) / sin(beta tau).
///
/// tau ranges over (pi/beta, 2pi/beta) when the equilibrium lies on the side
/// and over (0, pi/beta) when it is virtual. With x_e = 0 the map is linear,
/// exit = slope * entry.
struct ParametricHalfMap {
  Side side = Side::Right;
  double alpha = 0.0;
  double beta = 0.0;
  double x_e = 0.0;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  std::optional<double> linear_slope;

  [[nodiscard]] double entry(double tau) const;
  [[nodiscard]] double exit(double tau) const;
};

/// Throws NotFocus unless d - t^2/4 > 0 on the chosen side.
[[nodiscard]] ParametricHalfMap parametric_half_map(const CanonicalParams& c, Side side);

struct FinderOptions {
  double bracket_cap = 1e4;
  double scan_start = 1e-3;
  double fixed_point_tol = 1e-10;
  double neutral_tol = 1e-8;  ///< scan-level |P(y) - y| / (1 + |y|) marking a candidate neutral point
  FlowOptions scan_flow{};
  /// Refinement and cycle characterization run at a tighter tolerance so the
  /// finite-difference map derivative is not swamped by integration noise.
  FlowOptions fine_flow = [] {
    FlowOptions f;
    f.rtol = 1e-12;
    f.atol = 1e-14;
    return f;
  }();
};

struct ScanPoint {
  double y0 = 0.0;
  MapStatus status = MapStatus::NoReturn;
  double displacement = 0.0;  ///< P(y0) - y0
  bool neutral = false;
};

struct FinderResult {
  std::vector<CycleRecord> cycles;
  std::vector<ScanPoint> scan;
  std::vector<double> neutral;  ///< confirmed points with P(y) = y inside an annulus band
  bool annulus_band = false;

  [[nodiscard]] bool closed_orbit_found() const noexcept { return !cycles.empty() || !neutral.empty(); }
};

[[nodiscard]] FinderResult find_crossing_cycles(const SwitchedField& field, const FinderOptions& opts = {});

/// Characterize the closed orbit through (0, y_star) entering the right side.
[[nodiscard]] CycleRecord characterize_cycle(const ReturnMaps& maps, double y_star);

/// Even-odd rule.
[[nodiscard]] bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly);

/// CSV polyline x,y of a cycle.
void write_cycle_csv(std::ostream& out, const CycleRecord& c);

}  // namespace crosscycle
