#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "oscar/evaluation.hpp"

namespace {

using namespace oscar;

// Queries over `objects` ids in 10 classes; relevance is class membership.
struct Benchmark {
  std::vector<QueryRanking> rankings;
  ResolvedGroundTruth truth;
};

Benchmark make_benchmark(int queries, int objects) {
  std::mt19937 rng(5);
  std::vector<std::string> ids;
  for (int i = 0; i < objects; ++i) ids.push_back("m" + std::to_string(i));
  Benchmark b;
  for (int q = 0; q < queries; ++q) {
    auto r = ids;
    std::shuffle(r.begin(), r.end(), rng);
    const std::string id = "q" + std::to_string(q);
    RelevantSet rel;
    for (int i = q % 10; i < objects; i += 10) rel.insert(ids[i]);
    b.truth[id] = std::move(rel);
    b.rankings.push_back({id, std::move(r)});
  }
  return b;
}

void BM_MeanAp(benchmark::State& state) {
  const Benchmark b = make_benchmark(100, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_ap_at_k(b.rankings, b.truth, 10));
  }
}
BENCHMARK(BM_MeanAp)->Arg(100)->Arg(1000);

void BM_EvaluateRankings(benchmark::State& state) {
  const Benchmark b = make_benchmark(100, static_cast<int>(state.range(0)));
  const std::vector<int> ks{1, 3, 5, 10};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_rankings(b.rankings, b.truth, ks));
  }
}
BENCHMARK(BM_EvaluateRankings)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
