#include <benchmark/benchmark.h>

#include "ihb/evaluator.hpp"
#include "ihb/parallel.hpp"

using namespace ihb;

namespace {

MeasureSpec bench_measure() {
  const SpherePoint axis({0.3, -0.4, 0.866});
  return MeasureSpec(3, {AtomSpec{SpherePoint({1, 0, 0}), 0.5}},
                     DensitySpec(DensityFamily::exp_zonal, {0.4, 1.5}, axis));
}

std::vector<double> bench_grid() {
  std::vector<double> g;
  for (int i = 0; i < 64; ++i) g.push_back(0.999 * i / 63.0);
  return g;
}

void BM_ProfileSerial(benchmark::State& state) {
  const KernelParams p(Field::real, 3, 0.5);
  const MeasureSpec m = bench_measure();
  const QuadratureRule q = build_quadrature(3, 16, RuleKind::deterministic_product);
  const std::vector<double> g = bench_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial_profile_serial(p, m, SpherePoint::basis(3, 2), g, q));
  }
}

void BM_ProfileParallel(benchmark::State& state) {
  const KernelParams p(Field::real, 3, 0.5);
  const MeasureSpec m = bench_measure();
  const QuadratureRule q = build_quadrature(3, 16, RuleKind::deterministic_product);
  const std::vector<double> g = bench_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial_profile(p, m, SpherePoint::basis(3, 2), g, q));
  }
}

double smooth(std::span<const double> x) { return std::exp(x[0] - 0.5 * x[2]) * (1.0 + x[1]); }

void BM_IntegrateSerial(benchmark::State& state) {
  const QuadratureRule q =
      build_quadrature(3, static_cast<std::size_t>(state.range(0)), RuleKind::monte_carlo, 1);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_serial(q, smooth));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.size()));
}

void BM_IntegrateParallel(benchmark::State& state) {
  const QuadratureRule q =
      build_quadrature(3, static_cast<std::size_t>(state.range(0)), RuleKind::monte_carlo, 1);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(q, smooth));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.size()));
}

}  // namespace

BENCHMARK(BM_ProfileSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProfileParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IntegrateSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_IntegrateParallel)->Arg(1 << 16)->Arg(1 << 20)->UseRealTime();

int main(int argc, char** argv) {
  parallel::configure_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
