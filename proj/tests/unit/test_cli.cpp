#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "../support/synthetic.hpp"
#include "oscar/cli/cli.hpp"
#include "oscar/hashing.hpp"
#include "oscar/index_io.hpp"
#include "oscar/providers.hpp"
#include "oscar/serialization.hpp"

namespace oscar {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun oscar_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "oscar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<json> lines_of(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

// A workspace with rendered view images, captions and a FileBased cache for
// `n` models (K = 2 views on one ring, 4-d text space, 6-d vision space).
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("oscar_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_ / "renders");
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path index() const { return root_ / "index"; }
  fs::path cache() const { return root_ / "cache"; }

  void make_workspace(int n, bool skip_first_caption_embedding = false) {
    EmbeddingCache store;
    json models = json::array();
    for (int m = 0; m < n; ++m) {
      const std::string id = "model_" + std::to_string(m);
      json views = json::array(), captions = json::array();
      for (int k = 0; k < 2; ++k) {
        const std::string rel = "renders/" + id + "_" + std::to_string(k) + ".png";
        const std::string bytes = "fake png " + id + " view " + std::to_string(k);
        std::ofstream(root_ / rel, std::ios::binary) << bytes;
        auto vision = testing::random_vector(rng_, 6);
        store.put_image(as_bytes(bytes), Space::kVisionOnly, vision);
        views.push_back({{"view_id", k}, {"image_path", rel}});
        const std::string text = "a " + id + " seen from side " + std::to_string(k);
        auto text_vec = testing::random_vector(rng_, 4);
        if (!(skip_first_caption_embedding && m == 0 && k == 1)) store.put_text(text, text_vec);
        captions.push_back({{"view_id", k}, {"prompt_type", "attributes"}, {"text", text}});
        if (k == 0) {
          text_vecs_.push_back(text_vec);
          vision_vecs_.push_back(vision);
        }
      }
      models.push_back({{"model_id", id},
                        {"mesh_path", "meshes/" + id + ".obj"},
                        {"class_label", "c" + std::to_string(m % 3)},
                        {"views", views},
                        {"captions", captions}});
    }
    store.save(cache());
    const json manifest = {{"dims", {{"text_aligned", 4}, {"vision_only", 6}}},
                           {"K", 2},
                           {"elevations_deg", {0.0}},
                           {"radius", 2.0},
                           {"models", models}};
    std::ofstream(root_ / "models.json") << manifest.dump(1);
  }

  CliRun onboard() {
    return oscar_cli({"onboard", "--index", index().string(), "--models", (root_ / "models.json").string(),
                      "--provider", "file", "--cache", cache().string()});
  }

  // Query i targets model i exactly, so every winner is known.
  void write_queries(int n, bool with_bad = false) {
    std::ofstream q(root_ / "queries.jsonl");
    json truth = json::object();
    for (int i = 0; i < n; ++i) {
      const std::string id = "q" + std::to_string(i);
      q << json{{"query_id", id}, {"q_clip", text_vecs_[i]}, {"q_dino", vision_vecs_[i]}}.dump() << '\n';
      truth[id] = {{"instance", "model_" + std::to_string(i)}};
    }
    if (with_bad) {
      q << json{{"query_id", "bad"}, {"q_clip", {1.0, 2.0}}, {"q_dino", vision_vecs_[0]}}.dump() << '\n';
    }
    std::ofstream(root_ / "truth.json") << truth.dump();
  }

  fs::path root_;
  std::mt19937_64 rng_{2024};
  std::vector<std::vector<float>> text_vecs_, vision_vecs_;
};

TEST_F(CliTest, OnboardBuildsCompleteIndexAndIsIdempotent) {
  make_workspace(3);
  const CliRun first = onboard();
  EXPECT_EQ(first.code, 0) << first.out << first.err;
  EXPECT_NE(first.out.find("24 artifacts generated"), std::string::npos) << first.out << first.err;
  const ObjectIndex loaded = load_index(index());
  EXPECT_EQ(loaded.size(), 3u);
  EXPECT_EQ(loaded.complete_count(), 3u);
  EXPECT_EQ(loaded.object("model_1").class_label, "c1");
  EXPECT_EQ(loaded.object("model_1").views[1].pose.azimuth_deg, 180.0);

  const auto manifest_before = slurp(index() / kManifestFileName);
  const CliRun second = onboard();
  EXPECT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("0 artifacts generated"), std::string::npos) << second.out;
  EXPECT_EQ(slurp(index() / kManifestFileName), manifest_before);
}

TEST_F(CliTest, OnboardReportsMissingCaptionEmbedding) {
  make_workspace(3, true);
  const CliRun r = onboard();
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("incomplete model_0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("model_0/text_aligned/1/attributes"), std::string::npos) << r.out;
  const ObjectIndex loaded = load_index(index());
  EXPECT_EQ(loaded.complete_count(), 2u);
}

TEST_F(CliTest, OnboardEmitsRenderJobsForMissingViews) {
  make_workspace(2);
  fs::remove(root_ / "renders/model_1_1.png");
  const CliRun r = onboard();
  EXPECT_EQ(r.code, 1);
  const auto jobs = lines_of(index() / "render_jobs.jsonl");
  ASSERT_EQ(jobs.size(), 1u);
  EXPECT_EQ(jobs[0]["model_id"], "model_1");
  ASSERT_EQ(jobs[0]["poses"].size(), 1u);
  EXPECT_EQ(jobs[0]["poses"][0]["view_id"], 1);
  EXPECT_EQ(jobs[0]["poses"][0]["azimuth_deg"], 180.0);
  EXPECT_EQ(jobs[0]["background_color"], json({128, 128, 128}));
}

TEST_F(CliTest, OnboardWithUnreachableSidecarFailsCleanly) {
  make_workspace(1);
  const CliRun r = oscar_cli({"onboard", "--index", index().string(), "--models",
                           (root_ / "models.json").string(), "--provider", "remote", "--endpoint",
                           "http://127.0.0.1:9", "--timeout-ms", "500"});
  EXPECT_EQ(r.code, 2) << r.out << r.err;
  EXPECT_NE(r.err.find("partial progress"), std::string::npos) << r.err;
  EXPECT_EQ(load_index(index()).size(), 1u);
}

TEST_F(CliTest, RetrieveEvaluateRoundTrip) {
  make_workspace(12);
  ASSERT_EQ(onboard().code, 0);
  write_queries(12);
  const fs::path results = root_ / "results.jsonl";
  const CliRun r = oscar_cli({"retrieve", "--index", index().string(), "--queries",
                           (root_ / "queries.jsonl").string(), "--out", results.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(results);
  ASSERT_EQ(lines.size(), 12u);
  for (int i = 0; i < 12; ++i) {
    EXPECT_EQ(lines[i]["winner"], "model_" + std::to_string(i));
    EXPECT_EQ(lines[i]["run"]["manifest_version"], 1);
    EXPECT_EQ(lines[i]["run"]["config"]["retrieval"]["tau_text"], 0.37);
    EXPECT_TRUE(lines[i].contains("timing_ms"));
  }

  const fs::path report = root_ / "report.json";
  const CliRun e = oscar_cli({"evaluate", "--results", results.string(), "--ground-truth",
                           (root_ / "truth.json").string(), "--out", report.string()});
  ASSERT_EQ(e.code, 0) << e.err;
  const json j = json::parse(slurp(report));
  EXPECT_EQ(j["map"]["mAP@1"], 1.0);
  EXPECT_EQ(j["table1"]["ANMRR"], 0.0);
  EXPECT_EQ(j["table1"]["NN"], 1.0);
  EXPECT_EQ(j["map"].size(), 4u);
  for (const char* m : {"NN", "FT", "ST", "F", "DCG", "ANMRR"}) EXPECT_TRUE(j["table1"].contains(m));
  for (const char* k : {"mAP@1", "mAP@3", "mAP@5", "mAP@10"}) EXPECT_TRUE(j["map"].contains(k));
  EXPECT_NE(e.out.find("ANMRR"), std::string::npos);
}

TEST_F(CliTest, RetrieveRecordsPerQueryErrors) {
  make_workspace(5);
  ASSERT_EQ(onboard().code, 0);
  write_queries(5, true);
  const fs::path results = root_ / "results.jsonl";
  const CliRun r = oscar_cli({"retrieve", "--index", index().string(), "--queries",
                           (root_ / "queries.jsonl").string(), "--out", results.string()});
  EXPECT_EQ(r.code, 1);
  const auto lines = lines_of(results);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[5]["error"]["code"], "invalid_argument");
  for (int i = 0; i < 5; ++i) EXPECT_FALSE(lines[i].contains("error"));
}

TEST_F(CliTest, RetrieveIsDeterministicAcrossRunsAndThreads) {
  make_workspace(10);
  ASSERT_EQ(onboard().code, 0);
  write_queries(10);
  auto run = [&](const std::string& name, const std::string& threads) {
    const fs::path out = root_ / name;
    EXPECT_EQ(oscar_cli({"retrieve", "--index", index().string(), "--queries",
                         (root_ / "queries.jsonl").string(), "--out", out.string(), "--threads", threads})
                  .code,
              0);
    auto lines = lines_of(out);
    for (auto& l : lines) l.erase("timing_ms");
    return lines;
  };
  const auto a = run("a.jsonl", "1");
  EXPECT_EQ(a, run("b.jsonl", "1"));
  auto c = run("c.jsonl", "3");
  for (auto& l : c) l["run"]["config"] = a[0]["run"]["config"];
  EXPECT_EQ(a, c);
}

TEST_F(CliTest, EvaluateNamesQueryWithoutGroundTruth) {
  make_workspace(3);
  ASSERT_EQ(onboard().code, 0);
  write_queries(3);
  const fs::path results = root_ / "results.jsonl";
  ASSERT_EQ(oscar_cli({"retrieve", "--index", index().string(), "--queries",
                       (root_ / "queries.jsonl").string(), "--out", results.string()})
                .code,
            0);
  std::ofstream(root_ / "partial_truth.json") << R"({"q0": {"instance": "model_0"}})";
  const CliRun e = oscar_cli({"evaluate", "--results", results.string(), "--ground-truth",
                           (root_ / "partial_truth.json").string()});
  EXPECT_EQ(e.code, 2);
  EXPECT_NE(e.err.find("'q1'"), std::string::npos) << e.err;
}

TEST_F(CliTest, EvaluateClassGroundTruthNeedsIndex) {
  make_workspace(6);
  ASSERT_EQ(onboard().code, 0);
  write_queries(6);
  const fs::path results = root_ / "results.jsonl";
  ASSERT_EQ(oscar_cli({"retrieve", "--index", index().string(), "--queries",
                       (root_ / "queries.jsonl").string(), "--out", results.string()})
                .code,
            0);
  std::ofstream(root_ / "class_truth.json")
      << R"({"q0":{"class":"c0"},"q1":{"class":"c1"},"q2":{"class":"c2"},"q3":{"class":"c0"},"q4":{"class":"c1"},"q5":{"class":"c2"}})";
  EXPECT_EQ(oscar_cli({"evaluate", "--results", results.string(), "--ground-truth",
                       (root_ / "class_truth.json").string()})
                .code,
            2);
  const CliRun e = oscar_cli({"evaluate", "--results", results.string(), "--ground-truth",
                           (root_ / "class_truth.json").string(), "--index", index().string(),
                           "--k-list", "1,3"});
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("mAP@3"), std::string::npos);
}

TEST_F(CliTest, SweepGrids) {
  make_workspace(12);
  ASSERT_EQ(onboard().code, 0);
  write_queries(12);
  const std::vector<std::string> common{"--index", index().string(), "--queries",
                                        (root_ / "queries.jsonl").string(), "--ground-truth",
                                        (root_ / "truth.json").string()};
  auto sweep = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"sweep", "--out", (root_ / "sweep.csv").string()};
    args.insert(args.end(), common.begin(), common.end());
    args.insert(args.end(), extra.begin(), extra.end());
    const CliRun r = oscar_cli(args);
    std::vector<std::string> rows;
    std::istringstream in(slurp(root_ / "sweep.csv"));
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    return std::make_pair(r, rows);
  };

  auto [tau_run, tau_rows] = sweep({"--param", "tau"});
  ASSERT_EQ(tau_run.code, 0) << tau_run.err;
  ASSERT_EQ(tau_rows.size(), 14u);
  EXPECT_EQ(tau_rows[0].rfind("# {", 0), 0u);
  EXPECT_EQ(tau_rows[1], "tau_text,average_precision");
  EXPECT_EQ(tau_rows[2].substr(0, 4), "0.1,");
  EXPECT_EQ(tau_rows[13].substr(0, 5), "0.65,");

  auto [k_run, k_rows] = sweep({"--param", "k"});
  ASSERT_EQ(k_run.code, 0);
  ASSERT_EQ(k_rows.size(), 9u);
  EXPECT_EQ(k_rows[2].substr(0, 2), "5,");
  EXPECT_EQ(k_rows[8].substr(0, 3), "40,");

  // Above every score, each row reports the fallback-branch precision.
  auto [high_run, high_rows] = sweep({"--param", "tau", "--values", "1.5,2,3"});
  ASSERT_EQ(high_run.code, 0);
  ASSERT_EQ(high_rows.size(), 5u);
  const auto ap = [](const std::string& row) { return row.substr(row.find(',')); };
  EXPECT_EQ(ap(high_rows[2]), ap(high_rows[3]));
  EXPECT_EQ(ap(high_rows[3]), ap(high_rows[4]));

  auto [empty_run, _] = sweep({"--param", "tau", "--range", "0.5,0.2,0.05"});
  EXPECT_EQ(empty_run.code, 2);
}

TEST_F(CliTest, InspectAndViewpoints) {
  make_workspace(2, true);
  onboard();
  const CliRun r = oscar_cli({"inspect", "--index", index().string(), "--json"});
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["objects"], 2);
  EXPECT_EQ(j["complete"], 1);
  EXPECT_EQ(j["K"], 2);

  const CliRun v = oscar_cli({"viewpoints", "--count", "6", "--elevations", "30", "--radius", "2"});
  ASSERT_EQ(v.code, 0);
  const json poses = json::parse(v.out);
  ASSERT_EQ(poses.size(), 6u);
  EXPECT_EQ(poses[1]["azimuth_deg"], 60.0);
  EXPECT_EQ(oscar_cli({"viewpoints", "--count", "7", "--elevations", "-15,15"}).code, 2);
}

TEST(CliArgsTest, UsageErrorsExitTwo) {
  EXPECT_EQ(oscar_cli({}).code, 2);
  EXPECT_EQ(oscar_cli({"retrieve", "--index", "/nonexistent"}).code, 2);
  EXPECT_EQ(oscar_cli({"--help"}).code, 0);
  EXPECT_EQ(oscar_cli({"inspect", "--index", "/nonexistent/index"}).code, 2);
}

TEST(ValueRangeTest, TwelvePointGrid) {
  const auto grid = cli::default_tau_grid();
  ASSERT_EQ(grid.size(), 12u);
  EXPECT_EQ(grid.front(), 0.1);
  EXPECT_EQ(grid[5], 0.35);
  EXPECT_EQ(grid.back(), 0.65);
  EXPECT_EQ(cli::default_k_grid(), (std::vector<double>{5, 10, 15, 20, 25, 30, 40}));
}

}  // namespace
}  // namespace oscar
