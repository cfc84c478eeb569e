#include <benchmark/benchmark.h>

#include <cstdio>
#include <map>
#include <memory>
#include <random>

#include "oscar/geometry.hpp"
#include "oscar/index.hpp"
#include "oscar/retrieval.hpp"

namespace {

using namespace oscar;

constexpr int kViews = 8;
constexpr int kDim = 768;

std::vector<float> random_vector(std::mt19937& rng) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> v(kDim);
  for (auto& x : v) x = n(rng);
  return v;
}

// Built once per size and reused across benchmark runs.
const ObjectIndex& index_of(int objects) {
  static std::map<int, std::unique_ptr<ObjectIndex>> cache;
  auto& slot = cache[objects];
  if (slot) return *slot;
  std::mt19937 rng(static_cast<unsigned>(objects));
  slot = std::make_unique<ObjectIndex>(create_index(kDim, kDim, kViews));
  const auto poses = generate_viewpoints(kViews, kDefaultElevationsDeg, kDefaultRadius);
  for (int i = 0; i < objects; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "obj_%05d", i);
    NewObject o{id, std::nullopt, std::nullopt, {}, {}, {}};
    for (int k = 0; k < kViews; ++k) {
      o.views.push_back({k, poses[k], "", view_embedding_key(id, k)});
      o.captions.push_back({k, kDefaultPromptType, "caption", caption_embedding_key(id, k, kDefaultPromptType)});
      o.embeddings.emplace_back(view_embedding_key(id, k), EmbeddingVector{Space::kVisionOnly, random_vector(rng)});
      o.embeddings.emplace_back(caption_embedding_key(id, k, kDefaultPromptType),
                                EmbeddingVector{Space::kTextAligned, random_vector(rng)});
    }
    slot->add_object(std::move(o));
  }
  return *slot;
}

Query random_query(std::mt19937& rng) {
  Query q;
  q.query_id = "q";
  q.q_clip = {Space::kTextAligned, random_vector(rng)};
  q.q_dino = {Space::kVisionOnly, random_vector(rng)};
  return q;
}

void BM_Retrieve(benchmark::State& state) {
  const ObjectIndex& index = index_of(static_cast<int>(state.range(0)));
  std::mt19937 rng(7);
  const Query q = random_query(rng);
  RetrievalConfig config;
  config.tau_text = static_cast<double>(state.range(1)) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieve(index, q, config));
  }
}
// Second argument is tau in hundredths; -100 makes every object a candidate.
BENCHMARK(BM_Retrieve)
    ->Args({1000, 37})
    ->Args({1000, -100})
    ->Args({10000, 37})
    ->Args({10000, -100})
    ->Unit(benchmark::kMillisecond);

void BM_RankAll(benchmark::State& state) {
  const ObjectIndex& index = index_of(10000);
  std::mt19937 rng(8);
  const Query q = random_query(rng);
  const auto stage = static_cast<Stage>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_all(index, q, {}, stage));
  }
}
BENCHMARK(BM_RankAll)
    ->Arg(static_cast<int>(Stage::kTextOnly))
    ->Arg(static_cast<int>(Stage::kImageOnly))
    ->Arg(static_cast<int>(Stage::kTwoStage))
    ->Unit(benchmark::kMillisecond);

}  // namespace
