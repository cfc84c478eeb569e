#include "oscar/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "oscar/error.hpp"
#include "oscar/similarity.hpp"

namespace oscar {

std::string_view to_string(RoiMode mode) {
  return mode == RoiMode::kBoundingBox ? "bbox" : "segmentation";
}

RoiMode parse_roi_mode(std::string_view name) {
  if (name == "bbox" || name == "bounding_box") return RoiMode::kBoundingBox;
  if (name == "segmentation" || name == "segm") return RoiMode::kSegmentationGrayBackground;
  fail(ErrorCode::kInvalidArgument, "unknown ROI mode '" + std::string(name) + "'");
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kTextOnly: return "text";
    case Stage::kImageOnly: return "image";
    case Stage::kTwoStage: return "two-stage";
  }
  return "two-stage";
}

Stage parse_stage(std::string_view name) {
  if (name == "text") return Stage::kTextOnly;
  if (name == "image") return Stage::kImageOnly;
  if (name == "two-stage") return Stage::kTwoStage;
  fail(ErrorCode::kInvalidArgument, "unknown stage '" + std::string(name) +
                                        "' (expected text, image or two-stage)");
}

void validate(const RetrievalConfig& config) {
  if (!(config.tau_text >= -1.0) || std::isnan(config.tau_text)) {
    fail(ErrorCode::kInvalidArgument, "tau_text must be >= -1");
  }
  if (config.fallback_k < 1) fail(ErrorCode::kInvalidArgument, "fallback_k must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Normalized query: values plus cached norm.
struct PreparedQuery {
  std::span<const float> values;
  double norm = 0.0;
};

PreparedQuery prepare(const ObjectIndex& index, const EmbeddingVector& q, Space space,
                      std::string_view what) {
  if (q.space != space) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " must be in the " +
                                          std::string(to_string(space)) + " space");
  }
  validate_embedding(q, index.dim(space), what);
  const double n = l2_norm(q.values);
  if (n == 0.0) fail(ErrorCode::kDegenerateVector, std::string(what) + " has zero norm");
  return {q.values, n};
}

double max_cosine(const EmbeddingStore& store, std::span<const std::size_t> rows,
                  const PreparedQuery& q) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r : rows) {
    const double c = std::clamp(dot(q.values, store.row(r)) / (q.norm * store.norm(r)), -1.0, 1.0);
    best = std::max(best, c);
  }
  return best;
}

double text_score(const ObjectIndex& index, std::size_t pos, const PreparedQuery& q) {
  const auto& rows = index.rows(pos).caption_rows;
  if (rows.empty()) {
    fail(ErrorCode::kIncompleteObject,
         index.objects()[pos].model_id + " has no caption embeddings");
  }
  return max_cosine(index.store(Space::kTextAligned), rows, q);
}

double image_score(const ObjectIndex& index, std::size_t pos, const PreparedQuery& q) {
  const auto& rows = index.rows(pos).view_rows;
  if (rows.empty()) {
    fail(ErrorCode::kIncompleteObject, index.objects()[pos].model_id + " has no view embeddings");
  }
  return max_cosine(index.store(Space::kVisionOnly), rows, q);
}

// Descending score, ascending model_id on ties.
bool ranks_before(double score_a, const std::string& id_a, double score_b,
                  const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

struct Scored {
  std::size_t pos;
  double text;
  double image = 0.0;
};

struct TextStage {
  std::vector<Scored> scored;           // every complete object
  std::vector<std::size_t> candidates;  // indices into `scored`, ranked
  bool via_fallback = false;
  std::size_t skipped = 0;
};

TextStage run_text_stage(const ObjectIndex& index, const PreparedQuery& q_clip,
                         const RetrievalConfig& config) {
  validate(config);
  TextStage stage;
  stage.scored.reserve(index.size());
  for (std::size_t pos = 0; pos < index.size(); ++pos) {
    if (!index.is_complete(pos)) {
      if (!config.skip_incomplete) {
        fail(ErrorCode::kIncompleteObject,
             index.objects()[pos].model_id + " is not completely onboarded");
      }
      ++stage.skipped;
      continue;
    }
    stage.scored.push_back({pos, text_score(index, pos, q_clip)});
  }
  if (stage.scored.empty()) {
    fail(ErrorCode::kEmptyIndex, "index has no complete objects");
  }

  const auto& objects = index.objects();
  auto by_text = [&](std::size_t a, std::size_t b) {
    return ranks_before(stage.scored[a].text, objects[stage.scored[a].pos].model_id,
                        stage.scored[b].text, objects[stage.scored[b].pos].model_id);
  };
  for (std::size_t i = 0; i < stage.scored.size(); ++i) {
    if (stage.scored[i].text >= config.tau_text) stage.candidates.push_back(i);
  }
  if (!stage.candidates.empty()) {
    std::sort(stage.candidates.begin(), stage.candidates.end(), by_text);
    return stage;
  }
  stage.via_fallback = true;
  std::vector<std::size_t> all(stage.scored.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::size_t k = std::min(all.size(), static_cast<std::size_t>(config.fallback_k));
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), by_text);
  all.resize(k);
  stage.candidates = std::move(all);
  return stage;
}

CandidateSet to_candidate_set(const ObjectIndex& index, const TextStage& stage) {
  CandidateSet set;
  set.via_fallback = stage.via_fallback;
  set.skipped_incomplete = stage.skipped;
  set.entries.reserve(stage.candidates.size());
  for (std::size_t i : stage.candidates) {
    set.entries.push_back({index.objects()[stage.scored[i].pos].model_id, stage.scored[i].text});
  }
  return set;
}

}  // namespace

double sim_text(const ObjectIndex& index, std::string_view model_id,
                const EmbeddingVector& q_clip) {
  const auto q = prepare(index, q_clip, Space::kTextAligned, "q_clip");
  return text_score(index, index.position(model_id), q);
}

double sim_img(const ObjectIndex& index, std::string_view model_id,
               const EmbeddingVector& q_dino) {
  const auto q = prepare(index, q_dino, Space::kVisionOnly, "q_dino");
  return image_score(index, index.position(model_id), q);
}

CandidateSet filter_candidates(const ObjectIndex& index, const EmbeddingVector& q_clip,
                               const RetrievalConfig& config) {
  const auto q = prepare(index, q_clip, Space::kTextAligned, "q_clip");
  return to_candidate_set(index, run_text_stage(index, q, config));
}

RankedResult retrieve(const ObjectIndex& index, const Query& query,
                      const RetrievalConfig& config) {
  const auto q_clip = prepare(index, query.q_clip, Space::kTextAligned, "q_clip");
  const auto q_dino = prepare(index, query.q_dino, Space::kVisionOnly, "q_dino");

  RankedResult result;
  auto start = Clock::now();
  TextStage stage = run_text_stage(index, q_clip, config);
  result.timings.text_filter_ms = elapsed_ms(start);

  start = Clock::now();
  const auto& objects = index.objects();
  std::vector<Scored> candidates;
  candidates.reserve(stage.candidates.size());
  for (std::size_t i : stage.candidates) {
    Scored s = stage.scored[i];
    s.image = image_score(index, s.pos, q_dino);
    candidates.push_back(s);
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Scored& a, const Scored& b) {
    return ranks_before(a.image, objects[a.pos].model_id, b.image, objects[b.pos].model_id);
  });
  result.timings.image_refine_ms = elapsed_ms(start);

  result.ranking.reserve(candidates.size());
  for (const auto& s : candidates) {
    result.ranking.push_back({objects[s.pos].model_id, s.text, s.image});
  }
  result.winner = result.ranking.front().model_id;
  result.candidate_set = to_candidate_set(index, stage);
  return result;
}

FullRanking rank_all(const ObjectIndex& index, const Query& query,
                     const RetrievalConfig& config, Stage stage_kind) {
  const auto q_clip = prepare(index, query.q_clip, Space::kTextAligned, "q_clip");
  const auto q_dino = prepare(index, query.q_dino, Space::kVisionOnly, "q_dino");
  const auto& objects = index.objects();

  FullRanking ranking;
  ranking.stage = stage_kind;
  auto start = Clock::now();
  TextStage stage = run_text_stage(index, q_clip, config);
  ranking.candidate_set = to_candidate_set(index, stage);
  ranking.timings.text_filter_ms = elapsed_ms(start);

  start = Clock::now();
  auto by_text = [&](const Scored& a, const Scored& b) {
    return ranks_before(a.text, objects[a.pos].model_id, b.text, objects[b.pos].model_id);
  };
  auto by_image = [&](const Scored& a, const Scored& b) {
    return ranks_before(a.image, objects[a.pos].model_id, b.image, objects[b.pos].model_id);
  };
  auto emit = [&](const std::vector<Scored>& items, bool with_image) {
    for (const auto& s : items) {
      ranking.entries.push_back({objects[s.pos].model_id, s.text,
                                 with_image ? std::optional<double>(s.image) : std::nullopt});
    }
  };
  ranking.entries.reserve(stage.scored.size());

  switch (stage_kind) {
    case Stage::kTextOnly: {
      auto items = stage.scored;
      std::sort(items.begin(), items.end(), by_text);
      emit(items, false);
      break;
    }
    case Stage::kImageOnly: {
      auto items = stage.scored;
      for (auto& s : items) s.image = image_score(index, s.pos, q_dino);
      std::sort(items.begin(), items.end(), by_image);
      emit(items, true);
      break;
    }
    case Stage::kTwoStage: {
      std::vector<bool> is_candidate(stage.scored.size(), false);
      std::vector<Scored> head;
      std::vector<Scored> tail;
      for (std::size_t i : stage.candidates) is_candidate[i] = true;
      for (std::size_t i = 0; i < stage.scored.size(); ++i) {
        if (is_candidate[i]) {
          Scored s = stage.scored[i];
          s.image = image_score(index, s.pos, q_dino);
          head.push_back(s);
        } else {
          tail.push_back(stage.scored[i]);
        }
      }
      std::sort(head.begin(), head.end(), by_image);
      std::sort(tail.begin(), tail.end(), by_text);
      emit(head, true);
      emit(tail, false);
      break;
    }
  }
  ranking.timings.image_refine_ms = elapsed_ms(start);
  return ranking;
}

}  // namespace oscar
