#include <benchmark/benchmark.h>

#include "crosscycle/canonical.hpp"
#include "crosscycle/classify.hpp"
#include "crosscycle/example_system.hpp"
#include "crosscycle/poincare.hpp"

using namespace crosscycle;

static void BM_ParseEval(benchmark::State& state) {
  for (auto _ : state) {
    Expr e = parse("a*x + b*x^3 - exp(-2*x)");
    benchmark::DoNotOptimize(e.eval(0.7, {{"a", 1.0}, {"b", 2.0}}));
  }
}
BENCHMARK(BM_ParseEval);

static void BM_Differentiate(benchmark::State& state) {
  const Expr e = parse("sin(x)^2 * exp(-x) / (1 + x^2)");
  for (auto _ : state) benchmark::DoNotOptimize(differentiate(e));
}
BENCHMARK(BM_Differentiate);

static void BM_HalfMapRight(benchmark::State& state) {
  const ReturnMaps maps(SwitchedField::from_pwl(example_pwl(1.0)));
  for (auto _ : state) benchmark::DoNotOptimize(maps.right(-2.0).value);
}
BENCHMARK(BM_HalfMapRight);

static void BM_HalfMapRightLienardExpr(benchmark::State& state) {
  // Nonlinear Lienard branches go through expression evaluation.
  LienardSpec sys({parse("1 + x^2"), parse("x - 1 + 0.1*x^3"), parse("x + x^3/3")},
                  {parse("-1"), parse("x + 1"), parse("-x")});
  const ReturnMaps maps(SwitchedField::from_lienard(sys));
  for (auto _ : state) benchmark::DoNotOptimize(maps.right(-1.0).value);
}
BENCHMARK(BM_HalfMapRightLienardExpr);

static void BM_FindCycleExample(benchmark::State& state) {
  const SwitchedField field = SwitchedField::from_pwl(example_pwl(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(find_crossing_cycles(field).cycles.size());
}
BENCHMARK(BM_FindCycleExample)->Unit(benchmark::kMillisecond);

static void BM_FullReportPwl(benchmark::State& state) {
  const PwlSpec p = example_pwl(-0.01);
  for (auto _ : state) benchmark::DoNotOptimize(full_report(p).verdict.kind);
}
BENCHMARK(BM_FullReportPwl)->Unit(benchmark::kMillisecond);

static void BM_Canonicalize(benchmark::State& state) {
  const PwlSpec p{{1.0, 2.0, -3.0, 0.5}, {1.0, 2.0}, {-1.0, 1.0, -2.0, 0.3}, {0.5, -1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize(p));
}
BENCHMARK(BM_Canonicalize);
BENCHMARK_MAIN();
