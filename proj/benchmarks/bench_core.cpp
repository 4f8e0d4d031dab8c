#include <benchmark/benchmark.h>

#include <suitaeq/suita.hpp>

using namespace suitaeq;

namespace {

std::shared_ptr<const Domain> annulus() {
  static auto d = build_domain(DomainSpec::annulus(4.0));
  return d;
}

std::shared_ptr<const Domain> three_connected() {
  static auto d = build_domain(DomainSpec::circular(
      {{0.0, 0.0}, 1.0}, {{{0.45, 0.1}, 0.17}, {{-0.35, -0.3}, 0.13}}));
  return d;
}

void BM_DirichletFactorization(benchmark::State& state) {
  SolveOptions opts;
  opts.degree = int(state.range(0));
  for (auto _ : state) {
    DirichletSolver solver(three_connected(), opts);
    benchmark::DoNotOptimize(solver.basis()->size());
  }
}
BENCHMARK(BM_DirichletFactorization)->Arg(16)->Arg(32)->Arg(64);

void BM_GreenConstruct(benchmark::State& state) {
  DirichletSolver solver(three_connected());
  for (auto _ : state) {
    GreenFunction g = green_function(solver, Complex{0.1, 0.2});
    benchmark::DoNotOptimize(g.log_capacity());
  }
}
BENCHMARK(BM_GreenConstruct);

void BM_GreenValue(benchmark::State& state) {
  DirichletSolver solver(three_connected());
  const GreenFunction g = green_function(solver, Complex{0.1, 0.2});
  Complex z{-0.2, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(g.value(z));
}
BENCHMARK(BM_GreenValue);

void BM_HarmonicMeasures(benchmark::State& state) {
  DirichletSolver solver(three_connected());
  for (auto _ : state) {
    auto measures = harmonic_measures(solver);
    benchmark::DoNotOptimize(measures.size());
  }
}
BENCHMARK(BM_HarmonicMeasures);

void BM_MinimalL2(benchmark::State& state) {
  WeightSpec w;
  JetConfig jets;
  jets.points = {Complex{2.0, 0.0}};
  jets.orders = {1};
  jets.amplitudes = {Complex{1.0, 0.0}};
  EqualityOptions opts;
  opts.mesh_target = 8000;
  for (auto _ : state) {
    MinimalResult r = minimal_l2(annulus(), w, jets, int(state.range(0)), opts);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_MinimalL2)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_IntegralityDeltas(benchmark::State& state) {
  WeightSpec w;
  JetConfig jets;
  jets.points = {Complex{1.7, 0.0}};
  jets.orders = {1};
  for (auto _ : state) {
    auto deltas = integrality_deltas(annulus(), w, jets);
    benchmark::DoNotOptimize(deltas[0].delta);
  }
}
BENCHMARK(BM_IntegralityDeltas);

}  // namespace

BENCHMARK_MAIN();
