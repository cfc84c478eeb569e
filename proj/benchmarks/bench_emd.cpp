#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "oscar/emd.hpp"

namespace {

oscar::PointSet random_points(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> coords(n * 3);
  for (auto& x : coords) x = u(rng);
  return {3, std::move(coords)};
}

void BM_Emd(benchmark::State& state) {
  std::mt19937 rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_points(rng, n);
  const auto b = random_points(rng, n);
  const std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oscar::emd(a, w, b, w));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Emd)->RangeMultiplier(2)->Range(8, 256)->Complexity();

}  // namespace
