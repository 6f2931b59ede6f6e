#include <benchmark/benchmark.h>

#include <algorithm>
#include <functional>

#include "osa/osa.hpp"

namespace {

osa::Instance bench_instance(std::size_t n, std::size_t k, std::size_t horizon,
                             osa::RewardKind reward = osa::RewardKind::SumThroughput) {
  static const std::vector<double> beliefs = {0.62, 0.55, 0.48, 0.41, 0.36, 0.33};
  const osa::ChannelParams params(0.3, 0.7);
  return osa::make_instance(n, k, horizon, 0.9, params, osa::SensingModel(0.05), reward,
                            osa::BeliefVector({beliefs.begin(), beliefs.begin() + n}));
}

}  // namespace

static void OptimalValue(benchmark::State& state) {
  const auto inst = bench_instance(4, 2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(osa::optimal_value(inst).recursion_value);
  state.counters["expansions"] = osa::expansion_cost(4, 2, inst.horizon());
}
BENCHMARK(OptimalValue)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void OptimalValueMemoized(benchmark::State& state) {
  const auto inst = bench_instance(4, 2, static_cast<std::size_t>(state.range(0)));
  osa::SolverOptions options;
  options.memoize = true;
  for (auto _ : state) benchmark::DoNotOptimize(osa::optimal_value(inst, options).recursion_value);
}
BENCHMARK(OptimalValueMemoized)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void EvaluateMyopic(benchmark::State& state) {
  const auto inst = bench_instance(6, 2, static_cast<std::size_t>(state.range(0)),
                                   osa::RewardKind::AnySuccess);
  osa::MyopicPolicy policy(2);
  for (auto _ : state) benchmark::DoNotOptimize(osa::evaluate_policy(inst, policy).value);
}
BENCHMARK(EvaluateMyopic)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

static void AuxiliaryValue(benchmark::State& state) {
  const auto inst = bench_instance(6, 2, static_cast<std::size_t>(state.range(0)));
  std::vector<double> w(inst.initial().begin(), inst.initial().end());
  std::sort(w.begin(), w.end(), std::greater<>());
  for (auto _ : state) benchmark::DoNotOptimize(osa::auxiliary_value(inst, w, inst.horizon()));
}
BENCHMARK(AuxiliaryValue)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

static void EstimateValue(benchmark::State& state) {
  const auto inst = bench_instance(4, 2, 10);
  const osa::MyopicPolicy policy(2);
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(osa::estimate_value(inst, policy, 10000, 1, threads).mean);
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(EstimateValue)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BeliefUpdate(benchmark::State& state) {
  const osa::ChannelParams params(0.3, 0.7);
  const osa::SensingModel sensing(0.05);
  osa::BeliefVector w(std::vector<double>{0.62, 0.55, 0.48, 0.41});
  osa::Observation obs{{0, 1}, {0}};
  for (auto _ : state) {
    w = osa::update_belief(w, obs, params, sensing);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BeliefUpdate);

BENCHMARK_MAIN();
