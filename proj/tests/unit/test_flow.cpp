#include <cmath>
#include <random>
#include <sstream>

#include "crosscycle/error.hpp"
#include "crosscycle/example_system.hpp"
#include "crosscycle/flow.hpp"
#include "crosscycle/poincare.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crosscycle;

namespace {

SwitchedField symmetric_center() {
  return SwitchedField::from_lienard(
      LienardSpec({parse("1"), parse("x"), std::nullopt}, {parse("-1"), parse("x"), std::nullopt}));
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("switched field of the example") {
  const SwitchedField f = SwitchedField::from_pwl(example_pwl(1.0));
  CHECK(f.entry_sign() == -1);
  CHECK(f.tangency_y() == 0.0);
  CHECK(f.is_linear(Side::Right));
  CHECK(f.fold_visible(Side::Right));
  CHECK_FALSE(f.fold_visible(Side::Left));
  CHECK(f.side_from_line(1.0) == Side::Left);
  CHECK(f.side_from_line(-1.0) == Side::Right);
  const Vec2 v = f.eval(Side::Right, {1.0, 3.0});
  CHECK(v.x == doctest::Approx(-1.0));
  CHECK(v.y == doctest::Approx(0.0));
  CHECK(f.divergence(Side::Left, {-1.0, 0.0}) == doctest::Approx(-4.0));
  CHECK_THROWS_AS((void)SwitchedField::from_pwl(PwlSpec{{0, 1, -1, 0}, {0, 0}, {0, 1, -1, 0}, {-1, 0}}), SlidingPresent);

  const SwitchedField l = SwitchedField::from_lienard(example_system(1.0));
  CHECK(l.is_linear(Side::Right));
  CHECK(l.is_linear(Side::Left));
  CHECK(l.lienard() != nullptr);
}

TEST_CASE("right arc from (0,-1) matches the matrix exponential") {
  const PwlSpec p = example_pwl(1.0);
  const SwitchedField f = SwitchedField::from_pwl(p);
  Integrator integ(f);
  const OrbitSegment seg = integ.segment(Side::Right, {0.0, -1.0});
  CHECK(seg.end == SegmentEnd::SwitchCrossing);
  REQUIRE(seg.samples.size() > 5);
  int bad = 0;
  for (const Sample& s : seg.samples) {
    const Vec2 exact = testing::linear_flow(p.A_plus, p.b_plus, {0.0, -1.0}, s.t);
    const double tol = 1e-7 * (1.0 + s.t) * (1.0 + norm(exact));
    if (norm(s.z - exact) > tol) ++bad;
    if (s.t > seg.t0 && s.t < seg.t1 && s.z.x < 0.0) ++bad;
  }
  CHECK(bad == 0);
  CHECK(seg.event_residual <= 1e-12);
  CHECK(seg.end_point.y > 0.0);
}

TEST_CASE("property: linear sides follow the matrix exponential on random systems") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int bad = 0, checked = 0;
  for (int i = 0; i < 50; ++i) {
    const PwlSpec p = testing::random_pwl(rng, true);
    const SwitchedField f = SwitchedField::from_pwl(p);
    FlowOptions o;
    o.time_cap = 5.0;
    Integrator integ(f, o);
    const Vec2 z0{std::fabs(u(rng)) + 0.1, u(rng)};
    const OrbitSegment seg = integ.segment(Side::Right, z0);
    for (const Sample& s : seg.samples) {
      const Vec2 exact = testing::linear_flow(p.A_plus, p.b_plus, z0, s.t);
      if (norm(exact) > 1e6) break;
      ++checked;
      if (norm(s.z - exact) > 1e-7 * (1.0 + s.t) * (1.0 + norm(exact))) ++bad;
    }
  }
  CHECK(bad == 0);
  CHECK(checked > 500);
}

TEST_CASE("starting on the positive y axis enters the left side") {
  const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
  const auto segs = integrate(f, {0.0, 2.0}, Direction::Forward, {}, 3);
  REQUIRE_FALSE(segs.empty());
  CHECK(segs[0].side == Side::Left);
}

TEST_CASE("starting at an equilibrium is rejected") {
  const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
  CHECK_THROWS_AS((void)integrate(f, {1.0, 2.0}), PreconditionError);
  const SwitchedField g = SwitchedField::from_lienard(example_system(0.0));
  CHECK_THROWS_AS((void)integrate(g, {0.0, 0.0}), PreconditionError);
}

TEST_CASE("crossing residuals stay below 1e-12") {
  for (double chi : {1.0, 0.0, -0.01}) {
    const SwitchedField f = SwitchedField::from_lienard(example_system(chi));
    const auto segs = integrate(f, {0.0, -5.0}, Direction::Forward, {}, 40);
    int crossings = 0;
    for (const auto& s : segs) {
      if (s.end != SegmentEnd::SwitchCrossing) continue;
      ++crossings;
      CHECK(s.event_residual <= 1e-12);
      CHECK(std::fabs(s.end_point.x) <= 1e-12);
    }
    CHECK(crossings >= 10);
  }
}

TEST_CASE("backward integration returns to the start") {
  for (double chi : {1.0, 0.0}) {
    const SwitchedField f = SwitchedField::from_lienard(example_system(chi));
    const Vec2 start{0.0, -3.0};
    const auto fwd = integrate(f, start, Direction::Forward, {}, 4);
    REQUIRE(fwd.size() == 4);
    const auto back = integrate(f, fwd.back().end_point, Direction::Backward, {}, 4);
    REQUIRE(back.size() == 4);
    CHECK(norm(back.back().end_point - start) <= 1e-6 * (norm(start) + norm(fwd.back().end_point)));
  }
}

TEST_CASE("terminal events") {
  SUBCASE("blowup of an unstable node") {
    const PwlSpec p{{1, -1, 0, 2}, {0, 0}, {-1, -1, 1, 0}, {0, 0}};
    const SwitchedField f = SwitchedField::from_pwl(p);
    Integrator integ(f);
    CHECK(integ.segment(Side::Right, {1.0, -1.0}).end == SegmentEnd::Blowup);
  }
  SUBCASE("time cap") {
    FlowOptions o;
    o.time_cap = 0.1;
    const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
    Integrator integ(f, o);
    const OrbitSegment seg = integ.segment(Side::Right, {0.0, -50.0});
    CHECK(seg.end == SegmentEnd::TimeCap);
    CHECK(seg.t1 == doctest::Approx(0.1));
  }
  SUBCASE("capture by a stable focus") {
    const LienardSpec sys({parse("-1"), parse("x - 1"), std::nullopt}, {parse("-1"), parse("x"), std::nullopt});
    const SwitchedField f = SwitchedField::from_lienard(sys);
    Integrator integ(f);
    const OrbitSegment seg = integ.segment(Side::Right, {0.0, -1.0});
    CHECK(seg.end != SegmentEnd::SwitchCrossing);
  }
  SUBCASE("tangency at the fold") {
    const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
    Integrator integ(f);
    const OrbitSegment seg = integ.segment(Side::Left, {-1e-3, 0.0}, Direction::Backward);
    CHECK((seg.end == SegmentEnd::SwitchCrossing || seg.end == SegmentEnd::Tangency));
  }
}

TEST_CASE("lambda_gamma") {
  SUBCASE("stable cycle of the example") {
    const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
    const FinderResult fr = find_crossing_cycles(f);
    REQUIRE(fr.cycles.size() == 1);
    FlowOptions fine = FinderOptions{}.fine_flow;
    const auto cyc = integrate(f, {0.0, fr.cycles[0].y_D}, Direction::Forward, fine, 2);
    const double lam = lambda_gamma(cyc);
    CHECK(lam < 0.0);
    CHECK(lam == doctest::Approx(fr.cycles[0].lambda_gamma).epsilon(1e-6));
    SUBCASE("time reversal flips the sign") {
      const auto rev = integrate(f, {0.0, fr.cycles[0].y_D}, Direction::Backward, fine, 2);
      CHECK(lambda_gamma(rev) == doctest::Approx(-lam).epsilon(1e-6));
    }
  }
  SUBCASE("annulus orbit is neutral") {
    const SwitchedField f = symmetric_center();
    FlowOptions fine = FinderOptions{}.fine_flow;
    const auto cyc = integrate(f, {0.0, -2.0}, Direction::Forward, fine, 2);
    CHECK(std::fabs(lambda_gamma(cyc)) <= 1e-6);
  }
  SUBCASE("open orbit") {
    const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
    const auto segs = integrate(f, {0.0, -20.0}, Direction::Forward, {}, 2);
    CHECK_THROWS_AS((void)lambda_gamma(segs), NotClosed);
  }
}

TEST_CASE("trajectory csv") {
  const SwitchedField f = SwitchedField::from_lienard(example_system(1.0));
  const auto segs = integrate(f, {0.0, -1.0}, Direction::Forward, {}, 2);
  std::ostringstream out;
  write_trajectory_csv(out, segs);
  const std::string s = out.str();
  CHECK(s.rfind("t,x,y,side\n", 0) == 0);
  CHECK(s.find(",right\n") != std::string::npos);
  CHECK(s.find(",left\n") != std::string::npos);
}

}  // TEST_SUITE
