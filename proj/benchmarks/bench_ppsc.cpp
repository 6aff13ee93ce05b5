#include <benchmark/benchmark.h>

#include "ppsc/analysis.hpp"
#include "ppsc/mechanism.hpp"
#include "ppsc/rng.hpp"
#include "ppsc/symbolic.hpp"
#include "ppsc/verify.hpp"

namespace {

using namespace ppsc;

netgraph::OrientedTree line_tree(int n) {
  const netgraph::Graph g = netgraph::Graph::path_graph(n);
  return netgraph::spanning_tree(g, 7);
}

void BM_SymbolicRun(benchmark::State& state) {
  const netgraph::OrientedTree t = line_tree(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(symbolic::run_symbolic(t));
  }
}
BENCHMARK(BM_SymbolicRun)->Arg(8)->Arg(32)->Arg(128);

void BM_DppscRun(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const netgraph::OrientedTree t = line_tree(n);
  const auto mm = symbolic::extract_matrices(symbolic::run_symbolic(t));
  std::vector<double> beta(static_cast<std::size_t>(n), 1.0);
  const mechanism::NoiseModel noise(mechanism::NoiseFamily::gaussian, 0.0, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mechanism::run_dppsc(t, {beta, 0}, noise, seed++, &mm));
  }
}
BENCHMARK(BM_DppscRun)->Arg(8)->Arg(32);

void BM_RppscSteps(benchmark::State& state) {
  const netgraph::Graph g = netgraph::Graph::ring_graph(16);
  const mechanism::GossipMatrix p = mechanism::GossipMatrix::uniform(g);
  std::vector<double> beta(16, 1.0);
  const mechanism::NoiseModel noise(mechanism::NoiseFamily::laplace, 0.0, 2.0);
  std::uint64_t seed = 0;
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mechanism::run_rppsc_final(g, p, {beta, 0}, noise, steps, seed++));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_RppscSteps)->Arg(100)->Arg(1000);

void BM_SymEig(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SplitRng rng(3);
  numerics::Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::sym_eig(a));
  }
}
BENCHMARK(BM_SymEig)->Arg(8)->Arg(32)->Arg(64);

void BM_QtEstimate(benchmark::State& state) {
  const netgraph::Graph g = verify::demo5_graph();
  const mechanism::GossipMatrix p = mechanism::GossipMatrix::uniform(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        analysis::estimate_q_t(g, p, 48, static_cast<int>(state.range(0)), 11));
  }
}
BENCHMARK(BM_QtEstimate)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
