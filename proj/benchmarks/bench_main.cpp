#include <benchmark/benchmark.h>

#include <chemolimit/diffuse.hpp>
#include <chemolimit/helmholtz.hpp>
#include <chemolimit/operators.hpp>
#include <chemolimit/sharp.hpp>

#include <cmath>
#include <random>

using namespace chemolimit;

namespace {

ScalarField noise(const Grid& g) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = unit(rng);
  return f;
}

void BM_Laplacian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0, 1.0);
  ScalarField f = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_neumann(f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Laplacian)->Arg(128)->Arg(256)->Arg(512);

void BM_HelmholtzSpectral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0, 1.0);
  HelmholtzSolver solver(g, 1.0);
  ScalarField rhs = noise(g), out(g);
  for (auto _ : state) solver.solve_into(rhs, out);
}
BENCHMARK(BM_HelmholtzSpectral)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_HelmholtzCG(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0, 1.0);
  ScalarField rhs = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_helmholtz_cg(rhs, 1.0, 1e-10));
}
BENCHMARK(BM_HelmholtzCG)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DiffuseStep(benchmark::State& state) {
  ModelParams p;
  p.eps = 0.02;
  p.alpha = 0.2;
  p.chi.k = 1.0;
  p.nx = p.ny = static_cast<int>(state.range(0));
  InitialSpec spec;
  DiffuseStepper stepper(p);
  DiffuseState s = stepper.initial_state(initial_data(spec, p));
  for (auto _ : state) stepper.step(s);
}
BENCHMARK(BM_DiffuseStep)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_Redistance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0, 1.0);
  ScalarField squashed = ScalarField::from_function(g, [](double x, double y) {
    return 3.0 * ((x - 0.5) * (x - 0.5) + 0.5 * (y - 0.5) * (y - 0.5) - 0.06);
  });
  for (auto _ : state) benchmark::DoNotOptimize(redistance(squashed, 0.1));
}
BENCHMARK(BM_Redistance)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
