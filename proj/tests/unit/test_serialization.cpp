#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oscar/error.hpp"
#include "oscar/serialization.hpp"

namespace oscar {
namespace {

namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

TEST(SerializationTest, RoundScoreKeepsNineDigits) {
  EXPECT_EQ(round_score(0.123456789123), 0.123456789);
  EXPECT_EQ(round_score(1.0), 1.0);
  EXPECT_EQ(round_score(-0.5), -0.5);
}

TEST(SerializationTest, ResultRecordRoundTrip) {
  ResultRecord r;
  r.query_id = "q7";
  r.winner = "b";
  r.ranking = {{"b", 0.5, 0.75}, {"a", 0.25, std::nullopt}};
  r.candidate_set = CandidateSet{{{"b", 0.5}}, true, 2};
  r.timings = {1.5, 0.25};
  const json stamp = {{"config", {{"stage", "two-stage"}}}, {"manifest_version", 1}};
  const json j = result_record_to_json(r, stamp);
  EXPECT_EQ(j["run"], stamp);
  const ResultRecord back = result_record_from_json(j);
  EXPECT_EQ(back.query_id, "q7");
  EXPECT_EQ(back.winner, "b");
  EXPECT_EQ(back.ranking, r.ranking);
  EXPECT_EQ(back.candidate_set, r.candidate_set);
  EXPECT_EQ(back.timings.text_filter_ms, 1.5);
  EXPECT_FALSE(back.error_code);
}

TEST(SerializationTest, ErrorRecordRoundTrip) {
  ResultRecord r;
  r.query_id = "q1";
  r.error_code = "invalid_argument";
  r.error_message = "q_clip has 2 components";
  const json j = result_record_to_json(r, json::object());
  EXPECT_FALSE(j.contains("winner"));
  const ResultRecord back = result_record_from_json(j);
  EXPECT_EQ(back.error_code, r.error_code);
  EXPECT_EQ(back.error_message, r.error_message);
}

TEST(SerializationTest, QuerySpecFields) {
  const json j = json::parse(R"({"query_id": "q", "q_clip": [1, 2], "q_dino_key": "abc",
      "roi_image": "roi.png", "source": {"image_id": "img9", "prompt": "a mug", "roi_mode": "bbox"}})");
  const QuerySpec spec = query_spec_from_json(j);
  EXPECT_EQ(spec.query.q_clip.values, (std::vector<float>{1, 2}));
  EXPECT_TRUE(spec.query.q_dino.values.empty());
  EXPECT_EQ(spec.q_dino_key, "abc");
  EXPECT_EQ(spec.roi_image, "roi.png");
  EXPECT_EQ(spec.query.source.prompt, "a mug");
  EXPECT_EQ(spec.query.source.roi_mode, RoiMode::kBoundingBox);
  EXPECT_THROW(query_spec_from_json(json::parse(R"({"q_clip": ["x"]})")), Error);
}

TEST(SerializationTest, GroundTruthKinds) {
  const GroundTruth t = ground_truth_from_json(json::parse(R"({"a": {"instance": "m1"}, "b": {"class": "mug"}})"));
  EXPECT_EQ(t.at("a").kind, GroundTruthEntry::Kind::kInstance);
  EXPECT_EQ(t.at("b").value, "mug");
  EXPECT_THROW(ground_truth_from_json(json::parse(R"({"a": "m1"})")), Error);
}

TEST(SerializationTest, ReadsArraysObjectsAndLines) {
  EXPECT_EQ(read_json_records(write_temp("oscar_arr.json", "[{\"a\":1},{\"a\":2}]")).size(), 2u);
  EXPECT_EQ(read_json_records(write_temp("oscar_obj.json", "{\"a\":1}")).size(), 1u);
  EXPECT_EQ(read_json_records(write_temp("oscar_lines.jsonl", "{\"a\":1}\n\n{\"a\":2}\n")).size(), 2u);
  try {
    read_json_records(write_temp("oscar_bad.jsonl", "{\"a\":1}\n{oops\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  try {
    read_json_records("/nonexistent/file.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(SerializationTest, RenderJobListsPosesWithPositions) {
  RenderJob job;
  job.model_id = "m";
  job.view_ids = {3};
  job.poses = {{90.0, 0.0, 2.0, {0, 0, 0}}};
  const json j = to_json(job);
  EXPECT_EQ(j["poses"][0]["view_id"], 3);
  EXPECT_EQ(j["poses"][0]["position"], json({0.0, 2.0, 0.0}));
  EXPECT_EQ(j["image_size"], json({512, 512}));
  const CameraPose back = camera_pose_from_json(j["poses"][0]);
  EXPECT_EQ(back.azimuth_deg, 90.0);
  EXPECT_EQ(back.radius, 2.0);
}

TEST(SerializationTest, MetricReportGrid) {
  MetricReport r;
  r.map_at_k = {{1, 0.5}, {10, 0.75}};
  r.num_queries = 2;
  const json j = to_json(r);
  for (const char* m : {"NN", "FT", "ST", "F", "DCG", "ANMRR"}) EXPECT_TRUE(j["table1"].contains(m));
  EXPECT_EQ(j["map"]["mAP@10"], 0.75);
}

}  // namespace
}  // namespace oscar
