#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oscar/embedding.hpp"
#include "oscar/index.hpp"

namespace oscar {

enum class RoiMode { kBoundingBox, kSegmentationGrayBackground };

std::string_view to_string(RoiMode mode);
RoiMode parse_roi_mode(std::string_view name);

struct QuerySource {
  std::string image_id;
  std::string prompt;
  RoiMode roi_mode = RoiMode::kSegmentationGrayBackground;
};

/// ROI embeddings in both spaces.
struct Query {
  std::string query_id;
  EmbeddingVector q_clip{Space::kTextAligned, {}};
  EmbeddingVector q_dino{Space::kVisionOnly, {}};
  QuerySource source;
};

inline constexpr double kDefaultTextThreshold = 0.37;
inline constexpr int kDefaultFallbackK = 10;

struct RetrievalConfig {
  double tau_text = kDefaultTextThreshold;
  int fallback_k = kDefaultFallbackK;
  bool skip_incomplete = true;
};

// Errors: tau outside [-1, 1] (values above 1 are accepted to force the
// fallback branch) or fallback_k < 1 -> invalid-argument.
void validate(const RetrievalConfig& config);

struct Candidate {
  std::string model_id;
  double sim_text = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateSet {
  std::vector<Candidate> entries;  // sim_text descending, ties by model_id
  bool via_fallback = false;
  std::size_t skipped_incomplete = 0;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

struct RankedEntry {
  std::string model_id;
  double sim_text = 0.0;
  std::optional<double> sim_img;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct StageTimings {
  double text_filter_ms = 0.0;
  double image_refine_ms = 0.0;
};

struct RankedResult {
  std::string winner;
  std::vector<RankedEntry> ranking;  // candidates only, sim_img descending
  CandidateSet candidate_set;
  StageTimings timings;
};

enum class Stage { kTextOnly, kImageOnly, kTwoStage };

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);

struct FullRanking {
  Stage stage = Stage::kTwoStage;
  std::vector<RankedEntry> entries;
  CandidateSet candidate_set;
  StageTimings timings;
};

/// Max cosine between q_clip and the object's caption embeddings.
/// Errors: no caption embedding stored -> incomplete-object.
double sim_text(const ObjectIndex& index, std::string_view model_id,
                const EmbeddingVector& q_clip);

/// Max cosine between q_dino and the object's view embeddings.
double sim_img(const ObjectIndex& index, std::string_view model_id,
               const EmbeddingVector& q_dino);

/// Objects with sim_text >= tau; when none qualifies, the top fallback_k by
/// sim_text. Errors: no complete object -> empty-index.
CandidateSet filter_candidates(const ObjectIndex& index, const EmbeddingVector& q_clip,
                               const RetrievalConfig& config);

/// Two-stage retrieval: text filter, then argmax of sim_img over candidates.
RankedResult retrieve(const ObjectIndex& index, const Query& query,
                      const RetrievalConfig& config);

/// Ranking over every complete object. TwoStage puts candidates first (by
/// sim_img) followed by non-candidates (by sim_text).
FullRanking rank_all(const ObjectIndex& index, const Query& query,
                     const RetrievalConfig& config, Stage stage);

}  // namespace oscar
