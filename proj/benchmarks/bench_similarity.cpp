#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "oscar/similarity.hpp"

namespace {

std::vector<float> random_vector(std::mt19937& rng, std::size_t d) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

void BM_Cosine(benchmark::State& state) {
  std::mt19937 rng(1);
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(rng, d);
  const auto b = random_vector(rng, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oscar::cosine_similarity(a, b));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Cosine)->Arg(32)->Arg(512)->Arg(768)->Arg(1024);

}  // namespace
