#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "ifcf/curvature.hpp"
#include "ifcf/flow.hpp"
#include "ifcf/hypersurface.hpp"

using namespace ifcf;

namespace {

FlowProblem perturbed(int N) {
  const auto c = ArwConstants::make(2, 2.0, 1.0, -1.0);
  return {Grid::make(2, N), ArwModel::perturbed(c, 0.1, 0.5, 0.2), CurvatureFunction(CurvatureKind::NthRootGauss, 2)};
}

Field initial(const Grid& grid) {
  return sample_field(grid, [](auto x) { return -0.05 * (1.0 + 0.1 * std::cos(x[0]) * std::cos(x[1])); });
}

void BM_AssembleGeometry(benchmark::State& state) {
  const auto p = perturbed(static_cast<int>(state.range(0)));
  const auto u = initial(p.grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_geometry(u, 1.0, p.grid, p.model, p.cf));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.grid.size()));
}
BENCHMARK(BM_AssembleGeometry)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Rk4Step(benchmark::State& state) {
  const auto p = perturbed(static_cast<int>(state.range(0)));
  const auto start = assemble_geometry(initial(p.grid), 0.0, p.grid, p.model, p.cf);
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(start, 1e-2, p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.grid.size()));
}
BENCHMARK(BM_Rk4Step)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Rk4StepWithTrajectories(benchmark::State& state) {
  const auto p = perturbed(64);
  const auto start = assemble_geometry(initial(p.grid), 0.0, p.grid, p.model, p.cf);
  const std::vector<Point> seeds(static_cast<std::size_t>(state.range(0)), Point{0.7, 1.3});
  for (auto _ : state) {
    auto positions = seeds;
    benchmark::DoNotOptimize(step(start, 1e-2, p, &positions));
  }
}
BENCHMARK(BM_Rk4StepWithTrajectories)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_CurvatureEvaluate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CurvatureFunction f(CurvatureKind::NthRootGauss, n);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-0.3, 0.3);
  Matrix g = Matrix::Identity(n, n);
  Matrix h = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = 1.0 + i;
    for (int j = 0; j < i; ++j) g(i, j) = g(j, i) = 0.5 * unit(rng);
  }
  const Matrix mixed = g.inverse() * h;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.evaluate(mixed, g));
  }
}
BENCHMARK(BM_CurvatureEvaluate)->Arg(2)->Arg(3)->Arg(4);

void BM_KstarCertificate(benchmark::State& state) {
  const CurvatureFunction f(CurvatureKind::NthRootGauss, 2);
  KstarSampler sampler;
  sampler.samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(certify_kstar(f, sampler));
  }
}
BENCHMARK(BM_KstarCertificate)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
