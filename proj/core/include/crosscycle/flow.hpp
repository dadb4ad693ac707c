#pragma once

// Event-detecting integration of a switched planar field with the Filippov
// crossing convention on x = 0.

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "crosscycle/model.hpp"

namespace crosscycle {

/// The two half-plane vector fields and their contact with x = 0.
///
/// On the switching line the normal velocity is a12 (y - y_T) on both sides
/// (a12 = -1, y_T = 0 for Liénard input), so an orbit at (0, y) enters the
/// right side iff entry_sign() * (y - y_T) > 0.
class SwitchedField {
 public:
  static SwitchedField from_lienard(const LienardSpec& sys);
  /// Throws SlidingPresent unless a12+ a12- > 0 and b = 0.
  static SwitchedField from_pwl(const PwlSpec& sys);

  [[nodiscard]] Vec2 eval(Side s, Vec2 z) const;
  [[nodiscard]] double divergence(Side s, Vec2 z) const;
  /// dx/dt on x = 0 fed by side s.
  [[nodiscard]] double normal_velocity(Side s, double y) const;
  /// y' at the tangency point for side s.
  [[nodiscard]] double tangency_y_velocity(Side s) const;
  /// x'' at (0, y_T) under side s; the fold is visible from s when it points into s.
  [[nodiscard]] double fold_curvature(Side s) const;
  [[nodiscard]] bool fold_visible(Side s) const;

  [[nodiscard]] double tangency_y() const noexcept { return y_T_; }
  [[nodiscard]] int entry_sign() const noexcept { return sigma_; }
  /// Side an orbit leaving (0, y) moves into; nullopt when it cannot leave.
  [[nodiscard]] std::optional<Side> side_from_line(double y) const;

  [[nodiscard]] bool is_linear(Side s) const noexcept { return side(s).linear; }
  [[nodiscard]] const Mat2& matrix(Side s) const noexcept { return side(s).A; }
  [[nodiscard]] Vec2 offset(Side s) const noexcept { return side(s).b; }

  /// Equilibria of the side's field lying in its own closed half plane.
  [[nodiscard]] const std::vector<Vec2>& equilibria(Side s) const noexcept { return side(s).eq; }
  [[nodiscard]] const Census& census() const noexcept { return census_; }

  /// Set for Liénard input; enables p dy accounting in the (p, y) plane.
  [[nodiscard]] const LienardSpec* lienard() const noexcept { return lienard_.get(); }
  [[nodiscard]] double p_of(double x) const;

 private:
  struct SideData {
    bool linear = false;
    Mat2 A;
    Vec2 b;
    std::vector<Vec2> eq;
  };

  [[nodiscard]] const SideData& side(Side s) const noexcept { return s == Side::Right ? right_ : left_; }

  SideData right_;
  SideData left_;
  double a12_right_ = -1.0;
  double a12_left_ = -1.0;
  double y_T_ = 0.0;
  int sigma_ = -1;
  Census census_;
  std::shared_ptr<const LienardSpec> lienard_;
};

enum class Direction { Forward, Backward };

enum class SegmentEnd { SwitchCrossing, Tangency, EquilibriumApproach, Blowup, TimeCap };

[[nodiscard]] std::string_view to_string(SegmentEnd e) noexcept;

struct FlowOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double time_cap = 1e3;
  double state_cap = 1e8;
  long max_steps = 2'000'000;
  double event_tol = 1e-12;
  double tangency_tol = 1e-10;
  double equilibrium_radius = 1e-8;
  double h_max = 0.25;
  bool keep_samples = true;
};

struct Sample {
  double t = 0.0;
  Vec2 z;
};

struct OrbitSegment {
  Side side = Side::Right;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<Sample> samples;  ///< accepted step points, endpoints included
  SegmentEnd end = SegmentEnd::TimeCap;
  Vec2 start;
  Vec2 end_point;
  double event_residual = 0.0;      ///< |x| at the located crossing
  double divergence_integral = 0.0;  ///< int div dt along the segment (signed by direction)
  double p_dy_integral = 0.0;        ///< int p(x) dy along the segment (Liénard only)
};

/// One DP5(4) integrator with dense output; not shareable between threads.
class Integrator {
 public:
  explicit Integrator(const SwitchedField& field, FlowOptions opts = {});
  Integrator(SwitchedField&&, FlowOptions = {}) = delete;  // keeps a pointer to the field

  /// Integrate the field of side `s` from `start` until the first terminal
  /// event. `start` may lie on x = 0 when the orbit enters side s.
  [[nodiscard]] OrbitSegment segment(Side s, Vec2 start, Direction dir = Direction::Forward,
                                     double t0 = 0.0);

  [[nodiscard]] const FlowOptions& options() const noexcept { return opts_; }
  [[nodiscard]] const SwitchedField& field() const noexcept { return *field_; }

 private:
  struct Step {
    double t = 0.0;
    double h = 0.0;
    Vec2 z0, z1;
    std::array<Vec2, 7> k{};
  };

  Vec2 rhs(Side s, Vec2 z, double sign) const;
  bool attempt(Side s, double sign, Step& st, double& err) const;
  static Vec2 dense(const Step& st, double theta);
  void accumulate(Side s, const Step& st, double theta_end, double sign, OrbitSegment& seg) const;

  const SwitchedField* field_;
  FlowOptions opts_;
};

/// Follows an orbit across the switching line, one segment per side visit,
/// until a non-crossing terminal event or `max_segments`.
/// Throws PreconditionError when `start` is within the equilibrium radius of
/// a census point.
[[nodiscard]] std::vector<OrbitSegment> integrate(const SwitchedField& field, Vec2 start,
                                                  Direction dir = Direction::Forward,
                                                  const FlowOptions& opts = {}, int max_segments = 64);

/// Divergence integral over a closed crossing orbit; throws NotClosed when
/// the endpoints differ by more than 1e-6.
[[nodiscard]] double lambda_gamma(const std::vector<OrbitSegment>& cycle);

/// Writes CSV rows t,x,y,side.
void write_trajectory_csv(std::ostream& out, const std::vector<OrbitSegment>& segments);

}  // namespace crosscycle
