#include <cmath>
#include <random>

#include "crosscycle/canonical.hpp"
#include "crosscycle/error.hpp"
#include "crosscycle/example_system.hpp"
#include "crosscycle/hypotheses.hpp"
#include "doctest.h"

using namespace crosscycle;

namespace {

LienardSpec branches(const char* fp, const char* gp, const char* fm, const char* gm, ParamMap params = {}) {
  return LienardSpec({parse(fp), parse(gp), std::nullopt}, {parse(fm), parse(gm), std::nullopt}, std::move(params));
}

CanonicalParams example_canonical(double chi) { return canonicalize(example_pwl(chi)); }

}  // namespace

TEST_SUITE("hypotheses") {

TEST_CASE("H1") {
  const H1Result a = check_h1(example_system(1.0), 100.0);
  CHECK(a.holds);
  CHECK(a.x_e == doctest::Approx(1.0));
  const H1Result b = check_h1(branches("1", "x", "-1", "x"), 100.0);
  CHECK(b.holds);
  CHECK(b.x_e == 0.0);
  CHECK_FALSE(check_h1(branches("1", "(x - 1)*(x - 2)", "-1", "x"), 100.0).holds);
  CHECK_FALSE(check_h1(branches("1", "-1", "-1", "x"), 100.0).holds);
}

TEST_CASE("H2") {
  CHECK(check_h2(example_system(1.0), 100.0));
  CHECK(check_h2(branches("x", "x", "-1", "x"), 100.0));
  CHECK_FALSE(check_h2(branches("cos(x)", "x", "-1", "x"), 4.0));
  CHECK_FALSE(check_h2(branches("1", "x", "1", "x"), 10.0));
}

TEST_CASE("eta limits") {
  const EtaLimits e1 = eta_limits(example_system(1.0));
  CHECK(e1.eta_plus == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(e1.eta_minus == doctest::Approx(1.25).epsilon(1e-8));
  CHECK(std::fabs(eta_limits(branches("1", "x", "-1", "x")).eta_plus) <= 1e-8);
  const EtaLimits e3 = eta_limits(branches("1", "x - 2*a", "-1", "2*x + a", {{"a", 1.0}}));
  CHECK(e3.eta_plus == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(e3.eta_minus == doctest::Approx(-1.0).epsilon(1e-8));
  // g/f oscillates without a limit as p -> 0
  CHECK_THROWS_AS((void)eta_limits(branches("1", "sin(1/(x^2 + 1e-30))", "-1", "x")), NonConvergent);
}

TEST_CASE("H3") {
  const H3Result h = check_h3(example_system(1.0));
  CHECK(h.converged);
  CHECK(h.holds);
  CHECK_FALSE(h.equality_case);
  const H3Result bad = check_h3(branches("1", "x + 1", "-1", "x + 1"));
  CHECK(bad.converged);
  CHECK(bad.eta_plus > bad.eta_minus);
  CHECK_FALSE(bad.holds);
  SUBCASE("equality case decided by small p") {
    // eta = 0 on both sides; phi+ = -p^2 < phi- = p near 0
    const H3Result eq = check_h3(branches("1", "-x^2", "-1", "x"));
    CHECK(eq.equality_case);
    CHECK(eq.holds);
    const H3Result eq2 = check_h3(branches("1", "x", "-1", "x"));
    CHECK(eq2.equality_case);
    CHECK_FALSE(eq2.holds);
  }
}

TEST_CASE("star solution of the example") {
  const LienardSpec sys = LienardSpec::from_canonical(example_canonical(0.0));
  const StarScan s = solve_star(sys, PCoord(sys).pmax());
  REQUIRE(s.roots.size() == 1);
  CHECK(std::fabs(s.roots[0].x_plus - 8.0 / 3.0) <= 1e-9);
  CHECK(std::fabs(s.roots[0].x_minus + 4.0 / 3.0) <= 1e-9);
  const StarScan s1 = solve_star(LienardSpec::from_canonical(example_canonical(1.0)), 1e4);
  REQUIRE(s1.roots.size() == 1);
  CHECK(s1.roots[0].x_plus == doctest::Approx(6.0));
  CHECK(s1.roots[0].x_minus == doctest::Approx(-3.0));
}

TEST_CASE("star scan flags identically vanishing Lambda") {
  const LienardSpec sys = branches("1", "x", "-1", "x");
  const StarScan s = solve_star(sys, PCoord(sys).pmax());
  CHECK(s.lambda_identically_zero);
  CHECK(s.lambda_sup <= 1e-8);
}

TEST_CASE("necessary condition of case (i) fails: no star solution") {
  // dR/tR^2 = 0.5 <= dL/tL^2 = 1 and aR/tR = 1 > aL/tL = -1.25
  const LienardSpec sys = LienardSpec::from_canonical({2, -4, 2, 16, 2, 5, 0});
  CHECK(solve_star(sys, 1e4).roots.empty());
  CHECK(solve_star(sys, 1e4, 100.0, StarMethod::Generic).roots.empty());
}

TEST_CASE("star scan on a nonlinear system") {
  const LienardSpec sys = branches("1 + x^2", "x - 1", "-2", "0.1*x - 0.1");
  const PCoord pc(sys, 50.0);
  const StarScan s = solve_star(sys, pc.pmax(), 50.0);
  REQUIRE_FALSE(s.roots.empty());
  for (const auto& r : s.roots) {
    CHECK(r.x_minus < 0.0);
    CHECK(r.x_plus > 0.0);
    CHECK(std::fabs(sys.F(Side::Right, r.x_plus) - r.p) <= 1e-9 * (1 + r.p));
    CHECK(std::fabs(sys.F(Side::Left, r.x_minus) - r.p) <= 1e-9 * (1 + r.p));
    const double phip = sys.g(Side::Right, r.x_plus) / sys.f(Side::Right, r.x_plus);
    const double phim = sys.g(Side::Left, r.x_minus) / sys.f(Side::Left, r.x_minus);
    CHECK(std::fabs(phip - phim) <= 1e-9 * (1 + std::fabs(phip)));
  }
  CHECK(PCoord(sys, 50.0).lambda(s.roots[0].p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("H4") {
  const LienardSpec ex = example_system(1.0);
  // 2x/(x - 1) decreases on (6, 100)
  const CheckResult h = check_h4(ex, 6.0, 1.0, 100.0);
  CHECK(h.checked);
  CHECK_FALSE(h.holds);
  const LienardSpec inc({parse("1"), parse("1"), parse("x")}, {parse("-1"), parse("x"), std::nullopt});
  CHECK(check_h4(inc, 0.5, 0.0, 100.0).holds);
  const CheckResult sing = check_h4(branches("1", "(x - 1)*(x - 20)", "-1", "x"), 3.0, 1.0, 100.0);
  CHECK_FALSE(sing.checked);
  const LienardSpec id({parse("1"), parse("x"), parse("x")}, {parse("-1"), parse("x"), std::nullopt});
  CHECK_FALSE(check_h4(id, 0.5, 0.0, 100.0).holds);  // constant
  CHECK_FALSE(check_h4(ex, 0.5, 1.0, 100.0).checked);
}

TEST_CASE("H5") {
  const LienardSpec c1 = LienardSpec::from_canonical(example_canonical(1.0));
  const CheckResult h = check_h5(c1, 18.0, 1e4);
  CHECK(h.checked);
  CHECK(h.holds);
  CHECK(h.margin == doctest::Approx(0.5 - 5.0 / 16.0));
  CHECK_FALSE(check_h5(LienardSpec::from_canonical({1, -1, 1, 1, 1, -1, 0}), 1.0, 10.0).holds);
  const LienardSpec nl = branches("1 + x^2", "x - 1", "-2", "x - 1");
  const CheckResult g = check_h5(nl, 1.0, 20.0, 50.0);
  CHECK(g.checked);
  CHECK(std::isfinite(g.margin));
}

TEST_CASE("K function on canonical sides") {
  const LienardSpec c1 = LienardSpec::from_canonical(example_canonical(1.0));
  CHECK(k_function(c1, Side::Right, 3.0) == doctest::Approx(0.5));
  CHECK(k_function(c1, Side::Left, -2.0) == doctest::Approx(5.0 / 16.0));
  CHECK(k_function(example_system(1.0), Side::Right, 7.0) == doctest::Approx(0.5));
}

TEST_CASE("lambda_fn matches the linear form for canonical input") {
  const CanonicalParams c = example_canonical(1.0);
  const auto lam = lambda_fn(LienardSpec::from_canonical(c));
  for (double p : {0.5, 3.0, 18.0, 200.0}) {
    const double expect = (c.dR / (c.tR * c.tR) - c.dL / (c.tL * c.tL)) * p - (c.aR / c.tR - c.aL / c.tL);
    CHECK(lam(p) == doctest::Approx(expect));
  }
}

TEST_CASE("property: inverse branches round trip on 1000 random x") {
  std::mt19937_64 rng(3);
  const double xmax = 100.0;
  std::uniform_real_distribution<double> ux(-xmax, xmax);
  const LienardSpec canonical_sys = LienardSpec::from_canonical(example_canonical(1.0));
  const LienardSpec quad_sys = branches("1 + 0.1*x^2", "x", "-1 - abs(x)", "x");
  for (const LienardSpec* sys : {&canonical_sys, &quad_sys}) {
    const PCoord pc(*sys, xmax);
    CHECK(pc.p(0.0) == 0.0);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const double x = ux(rng);
      const double p = pc.p(x);
      if (p < 0.0) ++bad;
      const auto back = x >= 0.0 ? pc.x_plus(p) : pc.x_minus(p);
      if (!back || std::fabs(*back - x) > 1e-9 * (1.0 + std::fabs(x))) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("closed form and generic star scans agree on random canonical systems") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(0.3, 3.0), d(0.5, 6.0), a(-3.0, 3.0);
  int compared = 0;
  for (int i = 0; i < 40; ++i) {
    const CanonicalParams c{t(rng), -t(rng), d(rng), d(rng), a(rng), a(rng), 0.0};
    const LienardSpec sys = LienardSpec::from_canonical(c);
    const double pmax = PCoord(sys).pmax();
    const StarScan cf = solve_star(sys, pmax, 100.0, StarMethod::ClosedForm);
    const StarScan gen = solve_star(sys, pmax, 100.0, StarMethod::Generic);
    INFO("system ", i);
    REQUIRE(cf.roots.size() == gen.roots.size());
    for (std::size_t k = 0; k < cf.roots.size(); ++k) {
      CHECK(std::fabs(cf.roots[k].x_plus - gen.roots[k].x_plus) <= 1e-9 * (1 + cf.roots[k].x_plus));
      CHECK(std::fabs(cf.roots[k].x_minus - gen.roots[k].x_minus) <= 1e-9 * (1 + std::fabs(cf.roots[k].x_minus)));
      ++compared;
    }
  }
  CHECK(compared > 5);
}

TEST_CASE("report of the example") {
  for (double chi : {1.0, 0.0, -0.01}) {
    const HypothesisReport r = hypothesis_report(example_system(chi));
    CHECK(r.h1.holds);
    CHECK(r.h2);
    CHECK(r.h3.holds);
    CHECK(r.unique_star);
    CHECK(r.h5.holds);
    CHECK(r.pmax > 0.0);
  }
}

}  // TEST_SUITE
