#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oscar/embedding.hpp"
#include "oscar/geometry.hpp"
#include "oscar/prompts.hpp"

namespace oscar {

inline constexpr int kManifestVersion = 1;

struct ViewRecord {
  int view_id = 0;
  CameraPose pose;
  std::string image_path;
  std::string embedding_key;

  friend bool operator==(const ViewRecord&, const ViewRecord&) = default;
};

struct CaptionRecord {
  int view_id = 0;
  PromptType prompt_type = kDefaultPromptType;
  std::string text;
  std::string embedding_key;

  friend bool operator==(const CaptionRecord&, const CaptionRecord&) = default;
};

/// One database model. `class_label` is evaluation-only ground truth; no
/// retrieval code path reads it.
struct ObjectRecord {
  std::string model_id;
  std::optional<std::string> mesh_path;
  std::vector<ViewRecord> views;
  std::vector<CaptionRecord> captions;
  std::optional<std::string> class_label;

  friend bool operator==(const ObjectRecord&, const ObjectRecord&) = default;
};

struct MissingCaption {
  int view_id = 0;
  PromptType prompt_type = kDefaultPromptType;

  friend bool operator==(const MissingCaption&, const MissingCaption&) = default;
};

/// What onboarding still has to produce for one model.
struct MissingArtifacts {
  std::string model_id;
  std::vector<int> missing_views;
  std::vector<MissingCaption> missing_captions;
  std::vector<std::string> missing_embeddings;

  bool complete() const {
    return missing_views.empty() && missing_captions.empty() &&
           missing_embeddings.empty();
  }
  std::size_t count() const {
    return missing_views.size() + missing_captions.size() +
           missing_embeddings.size();
  }
};

// "{model_id}/vision_only/{view_id}"
std::string view_embedding_key(std::string_view model_id, int view_id);
// "{model_id}/text_aligned/{view_id}/{prompt_type}"
std::string caption_embedding_key(std::string_view model_id, int view_id,
                                  PromptType prompt_type);

using KeyedEmbeddings = std::vector<std::pair<std::string, EmbeddingVector>>;

/// Onboarding parameters recorded alongside the index for reproducibility.
struct OnboardingSettings {
  std::vector<double> elevations_deg{kDefaultElevationsDeg.begin(),
                                     kDefaultElevationsDeg.end()};
  double radius = kDefaultRadius;
  std::array<int, 2> image_size{512, 512};
  std::array<std::uint8_t, 3> background_rgb = kGrayBackground;
  // Prompt whose captions are required for an object to count as complete.
  PromptType caption_prompt = kDefaultPromptType;

  friend bool operator==(const OnboardingSettings&, const OnboardingSettings&) = default;
};

/// Dense row storage for one embedding space. Rows are addressed by
/// embedding key; the L2 norm of every row is cached in double precision.
class EmbeddingStore {
 public:
  EmbeddingStore(Space space, std::size_t dim) : space_(space), dim_(dim) {}

  Space space() const { return space_; }
  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return keys_.size(); }

  std::optional<std::size_t> find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key).has_value(); }
  std::span<const float> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }
  double norm(std::size_t r) const { return norms_[r]; }
  const std::string& key(std::size_t r) const { return keys_[r]; }
  const std::vector<std::string>& keys() const { return keys_; }
  std::span<const float> data() const { return data_; }

  // Caller has validated dimension and finiteness.
  std::size_t insert(std::string key, std::span<const float> values);
  void reserve(std::size_t rows);

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  Space space_;
  std::size_t dim_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

/// Arguments of add_object, grouped.
struct NewObject {
  std::string model_id;
  std::optional<std::string> mesh_path;
  std::optional<std::string> class_label;
  std::vector<ViewRecord> views;
  std::vector<CaptionRecord> captions;
  KeyedEmbeddings embeddings;
};

/// Store rows resolved for one object; kept in sync with its records.
struct ObjectRows {
  std::vector<std::size_t> caption_rows;
  std::vector<std::size_t> view_rows;
  bool complete = false;
};

/// The object database. Copyable value type: a loaded index is immutable
/// from the point of view of retrieval and safe to share across threads.
class ObjectIndex {
 public:
  ObjectIndex(int dim_text_aligned, int dim_vision_only, int view_count,
              OnboardingSettings settings = {});

  int manifest_version() const { return kManifestVersion; }
  int view_count() const { return view_count_; }
  std::size_t dim(Space space) const { return store(space).dim(); }
  const OnboardingSettings& settings() const { return settings_; }

  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }
  const std::vector<ObjectRecord>& objects() const { return objects_; }
  bool contains(std::string_view model_id) const;
  std::size_t position(std::string_view model_id) const;  // not-found
  const ObjectRecord& object(std::string_view model_id) const {
    return objects_[position(model_id)];
  }
  const ObjectRows& rows(std::size_t position) const { return rows_[position]; }
  bool is_complete(std::size_t position) const { return rows_[position].complete; }
  std::size_t complete_count() const;

  const EmbeddingStore& store(Space space) const {
    return space == Space::kTextAligned ? text_store_ : vision_store_;
  }

  /// Registers a new model with whatever artifacts already exist.
  /// Errors: duplicate model_id -> conflict; bad dims or malformed records ->
  /// invalid-argument; an embedding no record refers to -> integrity.
  void add_object(NewObject object);

  /// Attaches further views, captions or embeddings to an existing model.
  /// Same validation as add_object; nothing is modified on failure.
  void register_artifacts(std::string_view model_id, std::vector<ViewRecord> views,
                          std::vector<CaptionRecord> captions,
                          KeyedEmbeddings embeddings);

  /// Pure. Errors: unknown model_id -> not-found.
  MissingArtifacts verify_completeness(std::string_view model_id) const;

  void erase_class_labels();

  friend bool operator==(const ObjectIndex& a, const ObjectIndex& b);

 private:
  void check_artifacts(const ObjectRecord& base, std::span<const ViewRecord> views,
                       std::span<const CaptionRecord> captions,
                       const KeyedEmbeddings& embeddings) const;
  void commit_artifacts(std::size_t position, std::vector<ViewRecord> views,
                        std::vector<CaptionRecord> captions,
                        KeyedEmbeddings embeddings);
  void refresh_rows(std::size_t position);
  EmbeddingStore& mutable_store(Space space) {
    return space == Space::kTextAligned ? text_store_ : vision_store_;
  }

  int view_count_;
  OnboardingSettings settings_;
  std::vector<ObjectRecord> objects_;
  std::vector<ObjectRows> rows_;
  std::unordered_map<std::string, std::size_t> by_id_;
  EmbeddingStore text_store_;
  EmbeddingStore vision_store_;
};

/// Errors: non-positive dimension or view count -> invalid-argument.
ObjectIndex create_index(int dim_text_aligned, int dim_vision_only, int view_count,
                         OnboardingSettings settings = {});

}  // namespace oscar
