#include <benchmark/benchmark.h>

#include "ggmsel/genmodel.hpp"
#include "ggmsel/mb_baseline.hpp"
#include "ggmsel/metrics.hpp"
#include "ggmsel/selector.hpp"
#include "ggmsel/specfun.hpp"

using namespace ggmsel;

namespace {

Sample benchmark_sample(int n, int p, double q) {
  const GroundTruth t = build_ground_truth(sample_er_graph(p, q, 1), 2);
  return sample_gaussian(t, n, 3);
}

void BM_FisherTail(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fisher_tail(5, 9, x));
    x = x < 50.0 ? x * 1.01 : 0.1;
  }
}
BENCHMARK(BM_FisherTail);

void BM_PenaltyTable(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_penalty_table(15, p, 2.0, 4));
}
BENCHMARK(BM_PenaltyTable)->Arg(10)->Arg(40);

void BM_NeighborhoodSweep(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Sample s = benchmark_sample(15, p, 1.0 / p);
  for (auto _ : state) {
    double total = 0.0;
    for_each_neighborhood_fit(s, 0, 4, [&](VertexSet, double rss, std::span<const double>) { total += rss; });
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_NeighborhoodSweep)->Arg(10)->Arg(20);

void BM_Select(benchmark::State& state) {
  const int p = 10;
  const Sample s = benchmark_sample(15, p, 0.1);
  const PenaltyTable pen = build_penalty_table(15, p, 2.0, 4);
  const auto strategy = static_cast<Strategy>(state.range(0));
  const Family family = strategy == Strategy::ExactDecomposed ? Family::DegreeDirected : Family::Degree;
  const CollectionSpec spec(family, 4, p);
  for (auto _ : state) benchmark::DoNotOptimize(select(s, spec, pen, strategy).crit);
  state.SetLabel(std::string(strategy_name(strategy)));
}
BENCHMARK(BM_Select)
    ->Arg(static_cast<int>(Strategy::ExactDecomposed))
    ->Arg(static_cast<int>(Strategy::Stepwise))
    ->Arg(static_cast<int>(Strategy::BranchAndBound));

void BM_MbEstimate(benchmark::State& state) {
  const Sample s = benchmark_sample(15, static_cast<int>(state.range(0)), 0.1);
  LassoConfig cfg;
  cfg.strict = false;
  for (auto _ : state) benchmark::DoNotOptimize(mb_estimate(s, cfg).graph.edge_count());
}
BENCHMARK(BM_MbEstimate)->Arg(10)->Arg(40);

void BM_OracleRisk(benchmark::State& state) {
  const GroundTruth t = build_ground_truth(sample_er_graph(10, 0.1, 1), 2);
  LossAccumulator acc(t, 4);
  for (int r = 0; r < 20; ++r) acc.add_replicate(sample_gaussian(t, 15, 10 + r));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_risk(acc, {Family::Degree, 4, 10}).value);
}
BENCHMARK(BM_OracleRisk);

}  // namespace

BENCHMARK_MAIN();
