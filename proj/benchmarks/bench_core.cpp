#include "swarm/assignment.hpp"
#include "swarm/cnn.hpp"
#include "swarm/engagement.hpp"
#include "swarm/stp.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace swarm;

namespace {

Classifier bench_classifier() {
  const auto spec = CnnSpec::defender_motion();
  Classifier c{CnnModel(spec), ScalerStats{std::vector<double>(40, 0.0), std::vector<double>(40, 2500.0)}};
  c.model.initialize(3);
  return c;
}

void BM_Engagement(benchmark::State& state) {
  EngagementConfig cfg;
  cfg.num_defenders = static_cast<int>(state.range(0));
  const auto plan = motion_plan_for(cfg, MotionType::Star);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_engagement(cfg, plan, Tactic::AuctionPlus));
}
BENCHMARK(BM_Engagement)->Arg(1)->Arg(10)->Arg(15);

void BM_Assignment(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> cost(static_cast<std::size_t>(n * n));
  for (auto& c : cost) c = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(min_cost_assignment(cost, n, n));
}
BENCHMARK(BM_Assignment)->Arg(5)->Arg(10)->Arg(15);

void BM_CnnForward(benchmark::State& state) {
  const auto clf = bench_classifier();
  std::vector<double> x(static_cast<std::size_t>(clf.model.spec().window * 40), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(clf.model.forward(x));
}
BENCHMARK(BM_CnnForward);

void BM_CnnGradient(benchmark::State& state) {
  const auto clf = bench_classifier();
  std::vector<double> x(static_cast<std::size_t>(clf.model.spec().window * 40), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(clf.model, x, GradientHead::loss(1)));
}
BENCHMARK(BM_CnnGradient);

void BM_StpObjective(benchmark::State& state) {
  const auto clf = bench_classifier();
  EngagementConfig cfg;
  cfg.seed = 1201;
  const auto path = initial_guess(motion_plan_for(cfg, MotionType::Semi), cfg, 20);
  for (auto _ : state) benchmark::DoNotOptimize(stp(stack_predictions(clf, path, cfg)));
}
BENCHMARK(BM_StpObjective);

}  // namespace
BENCHMARK_MAIN();
