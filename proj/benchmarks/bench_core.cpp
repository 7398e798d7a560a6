// Microbenchmarks for the hot loops: the aggregate recursion, the brute-force
// convolution chain it is checked against, and the sampling layer.
#include <benchmark/benchmark.h>

#include <random>

#include "ldlab/compound.hpp"
#include "ldlab/rng.hpp"
#include "ldlab/severity.hpp"
#include "ldlab/simulate.hpp"

namespace {

ldlab::LatticePmf discretized_pareto(double h, double end) {
  const ldlab::SeverityModel sev{ldlab::Pareto{2.0, 0.5}};
  const auto K = static_cast<std::size_t>(end / h);
  return sev.discretize(h, K, ldlab::Rounding::midpoint);
}

void BM_PanjerRecursion(benchmark::State& state) {
  const auto sev = discretized_pareto(0.125, 512.0);
  const auto K = static_cast<std::size_t>(state.range(0));
  const auto count = ldlab::CountSpec::poisson(100.0);
  for (auto _ : state) {
    auto g = ldlab::panjer_pmf(count, sev, K);
    benchmark::DoNotOptimize(g.masses.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PanjerRecursion)->Arg(1024)->Arg(2048)->Arg(4096)->Complexity();

void BM_ConvolutionOracle(benchmark::State& state) {
  const auto sev = discretized_pareto(0.25, 64.0);
  const auto K = static_cast<std::size_t>(state.range(0));
  const auto count = ldlab::CountSpec::poisson(20.0);
  for (auto _ : state) {
    auto g = ldlab::convolution_pmf(count, sev, K, 1e-12);
    benchmark::DoNotOptimize(g.masses.data());
  }
}
BENCHMARK(BM_ConvolutionOracle)->Arg(256)->Arg(512);

void BM_NfoldChain(benchmark::State& state) {
  const auto sev = discretized_pareto(0.25, 64.0);
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    auto g = ldlab::nfold_pmf(sev, n, 1024);
    benchmark::DoNotOptimize(g.masses.data());
  }
}
BENCHMARK(BM_NfoldChain)->Arg(10)->Arg(40);

void BM_AliasTableDraw(benchmark::State& state) {
  const auto sev = discretized_pareto(0.125, 2048.0);
  const ldlab::AliasTable table(sev.masses);
  std::mt19937_64 eng = ldlab::make_engine({1, 2, 0});
  std::uint64_t acc = 0;
  for (auto _ : state) acc += table.draw(eng);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_AliasTableDraw);

void BM_PoissonTableDraw(benchmark::State& state) {
  const ldlab::PoissonTable table(static_cast<double>(state.range(0)));
  std::mt19937_64 eng = ldlab::make_engine({1, 1, 0});
  std::int64_t acc = 0;
  for (auto _ : state) acc += table.draw(eng);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PoissonTableDraw)->Arg(50)->Arg(200);

void BM_McWindowHits(benchmark::State& state) {
  const auto sev = discretized_pareto(0.125, 2048.0);
  const std::vector<ldlab::CellWindow> wins = {{400, 408}, {800, 808}, {1600, INT64_MAX}};
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto tally = ldlab::mc_window_hits(sev, 50.0, 0, nullptr, wins, samples, 20260819);
    benchmark::DoNotOptimize(tally.hits.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_McWindowHits)->Arg(65536)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
