#include "oscar/serialization.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

double round_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return std::strtod(buf, nullptr);
}

json to_json(const CameraPose& pose) {
  return {{"azimuth_deg", pose.azimuth_deg},
          {"elevation_deg", pose.elevation_deg},
          {"radius", pose.radius},
          {"look_at", pose.look_at}};
}

CameraPose camera_pose_from_json(const json& j) {
  CameraPose pose;
  pose.azimuth_deg = j.at("azimuth_deg").get<double>();
  pose.elevation_deg = j.at("elevation_deg").get<double>();
  pose.radius = j.at("radius").get<double>();
  if (j.contains("look_at")) pose.look_at = j.at("look_at").get<Vec3>();
  return pose;
}

json to_json(const RenderJob& job) {
  json poses = json::array();
  for (std::size_t i = 0; i < job.poses.size(); ++i) {
    json p = to_json(job.poses[i]);
    p["view_id"] = i < job.view_ids.size() ? job.view_ids[i] : static_cast<int>(i);
    p["position"] = pose_to_camera_position(job.poses[i]);
    poses.push_back(std::move(p));
  }
  return {{"model_id", job.model_id},
          {"mesh_path", job.mesh_path ? json(*job.mesh_path) : json(nullptr)},
          {"poses", std::move(poses)},
          {"image_size", job.image_size},
          {"background_color", job.background_rgb}};
}

json to_json(const RetrievalConfig& config) {
  return {{"tau_text", config.tau_text},
          {"fallback_k", config.fallback_k},
          {"skip_incomplete", config.skip_incomplete}};
}

json to_json(const CandidateSet& candidates) {
  json entries = json::array();
  for (const auto& c : candidates.entries) {
    entries.push_back({{"model_id", c.model_id}, {"sim_text", round_score(c.sim_text)}});
  }
  return {{"entries", std::move(entries)},
          {"via_fallback", candidates.via_fallback},
          {"skipped_incomplete", candidates.skipped_incomplete}};
}

json to_json(const RankedEntry& entry) {
  json j = {{"model_id", entry.model_id}, {"sim_text", round_score(entry.sim_text)}};
  if (entry.sim_img) j["sim_img"] = round_score(*entry.sim_img);
  return j;
}

json to_json(const StageTimings& timings) {
  return {{"text_filter", timings.text_filter_ms}, {"image_refine", timings.image_refine_ms}};
}

json to_json(const Table1Config& config) {
  return {{"f_cutoff", config.f_cutoff},
          {"f_cutoff_rule", "min(f_cutoff, N)"},
          {"window_factor", config.window_factor},
          {"window_rule", "window_factor * |C|"},
          {"anmrr_penalty", config.anmrr_penalty}};
}

json to_json(const MetricReport& report) {
  json map = json::object();
  for (const auto& [k, v] : report.map_at_k) map["mAP@" + std::to_string(k)] = v;
  json per_query = json::array();
  for (const auto& q : report.per_query) {
    json ap = json::object();
    for (const auto& [k, v] : q.ap_at_k) ap["AP@" + std::to_string(k)] = v;
    per_query.push_back({{"query_id", q.query_id},
                         {"relevant_count", q.relevant_count},
                         {"NN", q.nn},
                         {"FT", q.ft},
                         {"ST", q.st},
                         {"F", q.f},
                         {"DCG", q.dcg},
                         {"NMRR", q.nmrr},
                         {"ap", std::move(ap)}});
  }
  return {{"table1",
           {{"NN", report.nn},
            {"FT", report.ft},
            {"ST", report.st},
            {"F", report.f},
            {"DCG", report.dcg},
            {"ANMRR", report.anmrr}}},
          {"map", std::move(map)},
          {"num_queries", report.num_queries},
          {"per_query", std::move(per_query)},
          {"metric_config", to_json(report.config)}};
}

namespace {

EmbeddingVector vector_from_json(const json& j, Space space) {
  EmbeddingVector v{space, {}};
  if (!j.is_array()) {
    fail(ErrorCode::kInvalidArgument, std::string(to_string(space)) + " embedding must be an array");
  }
  v.values.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorCode::kInvalidArgument, "embedding components must be numbers");
    v.values.push_back(x.get<float>());
  }
  return v;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

QuerySpec query_spec_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "query record must be a JSON object");
  try {
    QuerySpec spec;
    spec.query.query_id = j.value("query_id", std::string());
    if (j.contains("q_clip")) spec.query.q_clip = vector_from_json(j.at("q_clip"), Space::kTextAligned);
    if (j.contains("q_dino")) spec.query.q_dino = vector_from_json(j.at("q_dino"), Space::kVisionOnly);
    spec.q_clip_key = optional_string(j, "q_clip_key");
    spec.q_dino_key = optional_string(j, "q_dino_key");
    spec.roi_image = optional_string(j, "roi_image");
    if (j.contains("source")) {
      const auto& s = j.at("source");
      spec.query.source.image_id = s.value("image_id", std::string());
      spec.query.source.prompt = s.value("prompt", std::string());
      if (s.contains("roi_mode")) {
        spec.query.source.roi_mode = parse_roi_mode(s.at("roi_mode").get<std::string>());
      }
    }
    return spec;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed query record: ") + e.what());
  }
}

std::vector<json> read_json_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  // Whole-file JSON first (single object or array), then JSON-lines.
  json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded()) {
    if (whole.is_array()) return whole.get<std::vector<json>>();
    if (whole.is_object()) return {whole};
  }
  std::vector<json> records;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(ErrorCode::kInvalidArgument,
           path.string() + ":" + std::to_string(line_no) + ": malformed JSON");
    }
    records.push_back(std::move(j));
  }
  return records;
}

json result_record_to_json(const ResultRecord& record, const json& run_stamp) {
  json j = {{"query_id", record.query_id}, {"run", run_stamp}};
  if (record.error_code) {
    j["error"] = {{"code", *record.error_code},
                  {"message", record.error_message.value_or("")}};
    return j;
  }
  j["winner"] = record.winner;
  json ranking = json::array();
  for (const auto& e : record.ranking) ranking.push_back(to_json(e));
  j["ranking"] = std::move(ranking);
  if (record.candidate_set) j["candidates"] = to_json(*record.candidate_set);
  j["timing_ms"] = to_json(record.timings);
  return j;
}

ResultRecord result_record_from_json(const json& j) {
  try {
    ResultRecord r;
    r.query_id = j.at("query_id").get<std::string>();
    if (j.contains("error")) {
      r.error_code = j.at("error").value("code", std::string("unknown"));
      r.error_message = j.at("error").value("message", std::string());
      return r;
    }
    r.winner = j.value("winner", std::string());
    for (const auto& e : j.at("ranking")) {
      RankedEntry entry;
      entry.model_id = e.at("model_id").get<std::string>();
      entry.sim_text = e.value("sim_text", 0.0);
      if (e.contains("sim_img")) entry.sim_img = e.at("sim_img").get<double>();
      r.ranking.push_back(std::move(entry));
    }
    if (j.contains("candidates")) {
      CandidateSet set;
      const auto& c = j.at("candidates");
      for (const auto& e : c.at("entries")) {
        set.entries.push_back({e.at("model_id").get<std::string>(), e.at("sim_text").get<double>()});
      }
      set.via_fallback = c.value("via_fallback", false);
      set.skipped_incomplete = c.value("skipped_incomplete", std::size_t{0});
      r.candidate_set = std::move(set);
    }
    if (j.contains("timing_ms")) {
      r.timings.text_filter_ms = j.at("timing_ms").value("text_filter", 0.0);
      r.timings.image_refine_ms = j.at("timing_ms").value("image_refine", 0.0);
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed result record: ") + e.what());
  }
}

GroundTruth ground_truth_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "ground truth must be a JSON object");
  GroundTruth truth;
  for (const auto& [query_id, entry] : j.items()) {
    if (entry.is_object() && entry.contains("instance")) {
      truth[query_id] = {GroundTruthEntry::Kind::kInstance, entry.at("instance").get<std::string>()};
    } else if (entry.is_object() && entry.contains("class")) {
      truth[query_id] = {GroundTruthEntry::Kind::kClass, entry.at("class").get<std::string>()};
    } else {
      fail(ErrorCode::kInvalidArgument,
           "ground truth of '" + query_id + "' needs an \"instance\" or \"class\" field");
    }
  }
  return truth;
}

}  // namespace oscar
