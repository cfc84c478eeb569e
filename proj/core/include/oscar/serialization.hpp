#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscar/evaluation.hpp"
#include "oscar/geometry.hpp"
#include "oscar/retrieval.hpp"

namespace oscar {

using json = nlohmann::json;

/// Rounds to 9 significant digits, the precision used for scores in result
/// files.
double round_score(double value);

json to_json(const CameraPose& pose);
CameraPose camera_pose_from_json(const json& j);
json to_json(const RenderJob& job);
json to_json(const RetrievalConfig& config);
json to_json(const CandidateSet& candidates);
json to_json(const RankedEntry& entry);
json to_json(const StageTimings& timings);
json to_json(const Table1Config& config);
json to_json(const MetricReport& report);

/// A query as read from a query file. Embeddings are either inline
/// ("q_clip"/"q_dino" arrays) or references resolved later: a cache key
/// ("q_clip_key"/"q_dino_key") or an ROI image path ("roi_image").
struct QuerySpec {
  Query query;
  std::optional<std::string> q_clip_key;
  std::optional<std::string> q_dino_key;
  std::optional<std::string> roi_image;
};

QuerySpec query_spec_from_json(const json& j);

/// Accepts a single JSON object, a JSON array, or JSON-lines. Errors:
/// malformed JSON -> invalid-argument (with line number).
std::vector<json> read_json_records(const std::filesystem::path& path);

/// One line of a results file: the ranking for the chosen stage, the
/// candidate set, per-stage timings and the run stamp.
struct ResultRecord {
  std::string query_id;
  std::optional<std::string> error_code;
  std::optional<std::string> error_message;
  std::string winner;
  std::vector<RankedEntry> ranking;
  std::optional<CandidateSet> candidate_set;
  StageTimings timings;
};

json result_record_to_json(const ResultRecord& record, const json& run_stamp);
ResultRecord result_record_from_json(const json& j);

/// {"q1": {"instance": "mug_03"}, "q2": {"class": "chair"}}
GroundTruth ground_truth_from_json(const json& j);

}  // namespace oscar
