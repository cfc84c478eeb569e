#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "../support/synthetic.hpp"
#include "oscar/error.hpp"
#include "oscar/index.hpp"

namespace oscar {
namespace {

using testing::FloatRows;
using testing::make_complete_object;
using testing::random_vector;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no oscar::Error thrown";
  return ErrorCode::kInvalidArgument;
}

FloatRows random_rows(std::mt19937_64& rng, int n, int dim) {
  FloatRows rows;
  for (int i = 0; i < n; ++i) rows.push_back(random_vector(rng, dim));
  return rows;
}

class IndexTest : public ::testing::Test {
 protected:
  NewObject complete(const std::string& id) {
    return make_complete_object(id, 8, random_rows(rng_, 8, 4), random_rows(rng_, 8, 6));
  }
  std::mt19937_64 rng_{42};
  ObjectIndex index_ = create_index(4, 6, 8);
};

TEST(CreateIndexTest, Examples) {
  const ObjectIndex a = create_index(512, 768, 8);
  EXPECT_EQ(a.size(), 0u);
  EXPECT_EQ(a.dim(Space::kTextAligned), 512u);
  EXPECT_EQ(a.dim(Space::kVisionOnly), 768u);
  EXPECT_EQ(a.view_count(), 8);
  EXPECT_EQ(a.manifest_version(), 1);

  const ObjectIndex b = create_index(1, 1, 1);
  EXPECT_TRUE(b.empty());

  EXPECT_EQ(code_of([] { create_index(512, 768, 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { create_index(0, 768, 8); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { create_index(512, -1, 8); }), ErrorCode::kInvalidArgument);
}

TEST(EmbeddingKeyTest, CanonicalForms) {
  EXPECT_EQ(view_embedding_key("m1", 3), "m1/vision_only/3");
  EXPECT_EQ(caption_embedding_key("m1", 0, PromptType::kBlind), "m1/text_aligned/0/blind");
}

TEST_F(IndexTest, AddCompleteObject) {
  index_.add_object(complete("a"));
  ASSERT_EQ(index_.size(), 1u);
  EXPECT_TRUE(index_.is_complete(0));
  EXPECT_TRUE(index_.verify_completeness("a").complete());
  EXPECT_EQ(index_.store(Space::kTextAligned).rows(), 8u);
  EXPECT_EQ(index_.store(Space::kVisionOnly).rows(), 8u);
  index_.add_object(complete("b"));
  EXPECT_EQ(index_.size(), 2u);
  EXPECT_EQ(index_.complete_count(), 2u);
}

TEST_F(IndexTest, DuplicateModelIdConflicts) {
  index_.add_object(complete("a"));
  EXPECT_EQ(code_of([&] { index_.add_object(complete("a")); }), ErrorCode::kConflict);
  EXPECT_EQ(index_.size(), 1u);
}

TEST_F(IndexTest, RejectsMalformedModelIds) {
  EXPECT_EQ(code_of([&] { index_.add_object(complete("")); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { index_.add_object(complete("a/b")); }), ErrorCode::kInvalidArgument);
}

TEST_F(IndexTest, ObjectWithoutCaptionsListsEachMissingCaption) {
  NewObject obj = complete("a");
  obj.captions.clear();
  std::erase_if(obj.embeddings, [](const auto& kv) { return kv.second.space == Space::kTextAligned; });
  index_.add_object(std::move(obj));
  EXPECT_EQ(index_.size(), 1u);
  EXPECT_FALSE(index_.is_complete(0));
  const MissingArtifacts missing = index_.verify_completeness("a");
  ASSERT_EQ(missing.missing_captions.size(), 8u);
  for (int k = 0; k < 8; ++k) {
    EXPECT_EQ(missing.missing_captions[k], (MissingCaption{k, kDefaultPromptType}));
  }
  EXPECT_TRUE(missing.missing_views.empty());
  EXPECT_TRUE(missing.missing_embeddings.empty());
}

TEST_F(IndexTest, MissingViewSevenIsReported) {
  NewObject obj = complete("a");
  obj.views.pop_back();
  std::erase_if(obj.embeddings, [](const auto& kv) { return kv.first == "a/vision_only/7"; });
  index_.add_object(std::move(obj));
  const MissingArtifacts missing = index_.verify_completeness("a");
  EXPECT_EQ(missing.missing_views, std::vector<int>{7});
  EXPECT_TRUE(missing.missing_captions.empty());
  EXPECT_TRUE(missing.missing_embeddings.empty());
}

TEST_F(IndexTest, MissingEmbeddingIsReportedByKey) {
  NewObject obj = complete("a");
  std::erase_if(obj.embeddings, [](const auto& kv) { return kv.first == "a/vision_only/3"; });
  index_.add_object(std::move(obj));
  const MissingArtifacts missing = index_.verify_completeness("a");
  EXPECT_EQ(missing.missing_embeddings, std::vector<std::string>{"a/vision_only/3"});
  EXPECT_EQ(missing.count(), 1u);
  EXPECT_FALSE(index_.is_complete(0));
}

TEST_F(IndexTest, RegisterArtifactsCompletesObject) {
  NewObject obj = complete("a");
  NewObject bare{obj.model_id, obj.mesh_path, obj.class_label, {}, {}, {}};
  index_.add_object(std::move(bare));
  EXPECT_EQ(index_.verify_completeness("a").missing_views.size(), 8u);
  index_.register_artifacts("a", obj.views, obj.captions, obj.embeddings);
  EXPECT_TRUE(index_.verify_completeness("a").complete());
  EXPECT_TRUE(index_.is_complete(0));
  EXPECT_EQ(code_of([&] { index_.register_artifacts("a", obj.views, {}, {}); }),
            ErrorCode::kConflict);
  EXPECT_EQ(code_of([&] { index_.register_artifacts("zzz", {}, {}, {}); }), ErrorCode::kNotFound);
}

TEST_F(IndexTest, RejectsInvalidArtifacts) {
  {
    NewObject obj = complete("a");
    obj.embeddings.emplace_back("a/vision_only/99", EmbeddingVector{Space::kVisionOnly, {1, 0, 0, 0, 0, 0}});
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kIntegrity);
  }
  {
    NewObject obj = complete("a");
    obj.embeddings.front().second.values.push_back(1.0f);
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kInvalidArgument);
  }
  {
    NewObject obj = complete("a");
    std::fill(obj.embeddings.front().second.values.begin(),
              obj.embeddings.front().second.values.end(), 0.0f);
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kDegenerateVector);
  }
  {
    NewObject obj = complete("a");
    obj.views[0].view_id = 8;
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kInvalidArgument);
  }
  {
    NewObject obj = complete("a");
    obj.views.push_back(obj.views[0]);
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kConflict);
  }
  {
    NewObject obj = complete("a");
    obj.captions[0].text.clear();
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kInvalidArgument);
  }
  {
    NewObject obj = complete("a");
    obj.views[2].embedding_key = "a/vision_only/5";
    EXPECT_EQ(code_of([&] { index_.add_object(std::move(obj)); }), ErrorCode::kInvalidArgument);
  }
  EXPECT_EQ(index_.size(), 0u);
  EXPECT_EQ(index_.store(Space::kVisionOnly).rows(), 0u);
}

TEST_F(IndexTest, OtherPromptCaptionsDoNotCountTowardCompleteness) {
  NewObject obj = make_complete_object("a", 8, random_rows(rng_, 8, 4), random_rows(rng_, 8, 6),
                                       PromptType::kBlind);
  index_.add_object(std::move(obj));
  EXPECT_EQ(index_.verify_completeness("a").missing_captions.size(), 8u);
  EXPECT_FALSE(index_.is_complete(0));
}

TEST_F(IndexTest, EraseClassLabels) {
  NewObject obj = complete("a");
  obj.class_label = "mug";
  index_.add_object(std::move(obj));
  ASSERT_EQ(index_.object("a").class_label, "mug");
  index_.erase_class_labels();
  EXPECT_FALSE(index_.object("a").class_label.has_value());
}

TEST_F(IndexTest, PositionOfUnknownIdIsNotFound) {
  EXPECT_EQ(code_of([&] { (void)index_.position("nope"); }), ErrorCode::kNotFound);
}

}  // namespace
}  // namespace oscar
