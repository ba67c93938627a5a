// Serial reference loops against the OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "rigidity/reconstruction.hpp"
#include "rigidity/rigidity_suite.hpp"

using namespace rigidity;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

const Domain& disc() {
  static const Domain d = unit_disc();
  return d;
}

RefractionField bump() { return make_medium(bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}}, true), disc()); }

void BM_Hodograph(benchmark::State& state) {
  RefractionField n = bump();
  for (auto _ : state) benchmark::DoNotOptimize(build_hodograph(n, disc(), 32, 32, mode(state)).tau.data());
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Hodograph)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InequalityLhs(benchmark::State& state) {
  RefractionField one = make_medium(constant_spec(1.0), disc()), n = bump();
  SphereBundleGrid g = make_sphere_bundle_grid(disc(), 8, 16);
  for (auto _ : state) benchmark::DoNotOptimize(inequality_lhs(one, n, disc(), g, mode(state)).value);
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_InequalityLhs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_XrayTable(benchmark::State& state) {
  RefractionField n = bump();
  ScalarField f = gaussian_bumps({{1.0, {0.3, 0.1}, 0.25}}, &disc());
  BoundaryGrid bg = BoundaryGrid::make(disc(), 32, 32);
  for (auto _ : state) benchmark::DoNotOptimize(build_xray_table(f, n, disc(), bg, mode(state)).g.data());
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_XrayTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TwoPointForward(benchmark::State& state) {
  ModelParameterization p = ModelParameterization::radial(ScalarField::constant(1.0), 3, disc());
  TomographyProblem prob = make_problem(disc(), p, p.medium({0.05, 0.0, 0.0}, disc()), 16, 16);
  for (auto _ : state) benchmark::DoNotOptimize(two_point_forward(prob, {0.01, 0.0, 0.0}, mode(state)).T.data());
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_TwoPointForward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
