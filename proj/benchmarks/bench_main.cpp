#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "annoloop/distance.hpp"
#include "annoloop/eval.hpp"
#include "annoloop/sampler.hpp"

namespace {

annoloop::FeatureMatrix features(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("img" + std::to_string(i));
    for (auto& v : rows[i]) v = normal(rng);
  }
  return {std::move(ids), std::move(rows)};
}

void BM_PairwiseEuclidean(benchmark::State& state) {
  const auto fm = features(static_cast<std::size_t>(state.range(0)), 512);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(annoloop::pairwise_euclidean(fm, false, threads));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairwiseEuclidean)->Args({256, 1})->Args({1024, 1})->Args({1024, 0})->Unit(benchmark::kMillisecond);

void BM_OrderDissimilar(benchmark::State& state) {
  const auto dm = annoloop::pairwise_euclidean(features(static_cast<std::size_t>(state.range(0)), 16));
  for (auto _ : state) benchmark::DoNotOptimize(annoloop::order_dissimilar(dm, 1, 7));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OrderDissimilar)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

void BM_MatchGreedy(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<annoloop::ObjectLabel> gt;
  std::vector<annoloop::Prediction> preds;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    gt.push_back({"a", {x, y, x + 40, y + 40}});
    preds.push_back({"a", {x + 2, y - 1, x + 41, y + 38}, 0.5});
  }
  for (auto _ : state) benchmark::DoNotOptimize(annoloop::match_greedy(preds, gt, 0.5));
}
BENCHMARK(BM_MatchGreedy)->Arg(10)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
