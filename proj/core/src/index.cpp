#include "oscar/index.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <string>

#include "oscar/error.hpp"
#include "oscar/similarity.hpp"

namespace oscar {

std::string view_embedding_key(std::string_view model_id, int view_id) {
  return std::string(model_id) + "/" + std::string(to_string(Space::kVisionOnly)) + "/" +
         std::to_string(view_id);
}

std::string caption_embedding_key(std::string_view model_id, int view_id,
                                  PromptType prompt_type) {
  return std::string(model_id) + "/" + std::string(to_string(Space::kTextAligned)) + "/" +
         std::to_string(view_id) + "/" + std::string(to_string(prompt_type));
}

// ---------------------------------------------------------------------------
// EmbeddingStore

std::optional<std::size_t> EmbeddingStore::find(std::string_view key) const {
  auto it = by_key_.find(std::string(key));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingStore::insert(std::string key, std::span<const float> values) {
  const std::size_t r = keys_.size();
  data_.insert(data_.end(), values.begin(), values.end());
  norms_.push_back(l2_norm(values));
  by_key_.emplace(key, r);
  keys_.push_back(std::move(key));
  return r;
}

void EmbeddingStore::reserve(std::size_t rows) {
  data_.reserve(rows * dim_);
  norms_.reserve(rows);
  keys_.reserve(rows);
  by_key_.reserve(rows);
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  if (a.space_ != b.space_ || a.dim_ != b.dim_ || a.rows() != b.rows()) return false;
  // Row order is a storage detail; rows are compared bitwise by key so that
  // -0.0 vs 0.0 counts as a difference.
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto other = b.find(a.keys_[r]);
    if (!other) return false;
    if (std::memcmp(a.row(r).data(), b.row(*other).data(), a.dim_ * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// ObjectIndex

namespace {

void check_model_id(std::string_view model_id) {
  if (model_id.empty()) fail(ErrorCode::kInvalidArgument, "model_id must not be empty");
  if (model_id.find('/') != std::string_view::npos) {
    fail(ErrorCode::kInvalidArgument,
         "model_id '" + std::string(model_id) + "' must not contain '/'");
  }
}

// Which space an embedding key belongs to, derived from the key layout.
std::optional<Space> space_of_key(std::string_view model_id, std::string_view key) {
  if (key.size() <= model_id.size() + 1 || key.substr(0, model_id.size()) != model_id ||
      key[model_id.size()] != '/') {
    return std::nullopt;
  }
  auto rest = key.substr(model_id.size() + 1);
  for (Space s : kAllSpaces) {
    auto name = to_string(s);
    if (rest.size() > name.size() && rest.substr(0, name.size()) == name &&
        rest[name.size()] == '/') {
      return s;
    }
  }
  return std::nullopt;
}

}  // namespace

ObjectIndex::ObjectIndex(int dim_text_aligned, int dim_vision_only, int view_count,
                         OnboardingSettings settings)
    : view_count_(view_count),
      settings_(std::move(settings)),
      text_store_(Space::kTextAligned,
                  static_cast<std::size_t>(std::max(dim_text_aligned, 0))),
      vision_store_(Space::kVisionOnly,
                    static_cast<std::size_t>(std::max(dim_vision_only, 0))) {
  if (dim_text_aligned <= 0 || dim_vision_only <= 0) {
    fail(ErrorCode::kInvalidArgument, "embedding dimensions must be positive");
  }
  if (view_count <= 0) fail(ErrorCode::kInvalidArgument, "K must be positive");
}

ObjectIndex create_index(int dim_text_aligned, int dim_vision_only, int view_count,
                         OnboardingSettings settings) {
  return ObjectIndex(dim_text_aligned, dim_vision_only, view_count, std::move(settings));
}

bool ObjectIndex::contains(std::string_view model_id) const {
  return by_id_.count(std::string(model_id)) != 0;
}

std::size_t ObjectIndex::position(std::string_view model_id) const {
  auto it = by_id_.find(std::string(model_id));
  if (it == by_id_.end()) {
    fail(ErrorCode::kNotFound, "unknown model_id '" + std::string(model_id) + "'");
  }
  return it->second;
}

std::size_t ObjectIndex::complete_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const ObjectRows& r) { return r.complete; }));
}

void ObjectIndex::check_artifacts(const ObjectRecord& base,
                                  std::span<const ViewRecord> views,
                                  std::span<const CaptionRecord> captions,
                                  const KeyedEmbeddings& embeddings) const {
  const std::string& id = base.model_id;
  std::set<int> view_ids;
  for (const auto& v : base.views) view_ids.insert(v.view_id);
  std::set<std::pair<int, PromptType>> caption_ids;
  for (const auto& c : base.captions) caption_ids.emplace(c.view_id, c.prompt_type);
  std::set<std::string> referenced;
  for (const auto& v : base.views) referenced.insert(v.embedding_key);
  for (const auto& c : base.captions) referenced.insert(c.embedding_key);

  for (const auto& v : views) {
    if (v.view_id < 0 || v.view_id >= view_count_) {
      fail(ErrorCode::kInvalidArgument, id + ": view_id " + std::to_string(v.view_id) +
                                            " outside [0, " + std::to_string(view_count_) + ")");
    }
    if (!view_ids.insert(v.view_id).second) {
      fail(ErrorCode::kConflict, id + ": duplicate view " + std::to_string(v.view_id));
    }
    if (v.embedding_key != view_embedding_key(id, v.view_id)) {
      fail(ErrorCode::kInvalidArgument, id + ": view embedding_key '" + v.embedding_key +
                                            "' does not follow the key layout");
    }
    if (!(v.pose.radius > 0.0) || !(v.pose.elevation_deg >= -90.0 && v.pose.elevation_deg <= 90.0)) {
      fail(ErrorCode::kInvalidArgument, id + ": invalid camera pose for view " +
                                            std::to_string(v.view_id));
    }
    referenced.insert(v.embedding_key);
  }
  for (const auto& c : captions) {
    if (c.view_id < 0 || c.view_id >= view_count_) {
      fail(ErrorCode::kInvalidArgument, id + ": caption view_id " + std::to_string(c.view_id) +
                                            " outside [0, " + std::to_string(view_count_) + ")");
    }
    if (c.text.empty()) {
      fail(ErrorCode::kInvalidArgument, id + ": caption text must not be empty");
    }
    if (!caption_ids.emplace(c.view_id, c.prompt_type).second) {
      fail(ErrorCode::kConflict, id + ": duplicate caption for view " +
                                     std::to_string(c.view_id) + " prompt " +
                                     std::string(to_string(c.prompt_type)));
    }
    if (c.embedding_key != caption_embedding_key(id, c.view_id, c.prompt_type)) {
      fail(ErrorCode::kInvalidArgument, id + ": caption embedding_key '" + c.embedding_key +
                                            "' does not follow the key layout");
    }
    referenced.insert(c.embedding_key);
  }

  std::set<std::string> supplied;
  for (const auto& [key, vec] : embeddings) {
    if (!referenced.count(key)) {
      fail(ErrorCode::kIntegrity, id + ": embedding '" + key + "' is not referenced by any record");
    }
    const auto space = space_of_key(id, key);
    if (!space || *space != vec.space) {
      fail(ErrorCode::kInvalidArgument, id + ": embedding '" + key + "' declares space " +
                                            std::string(to_string(vec.space)));
    }
    validate_embedding(vec, dim(vec.space), key);
    if (l2_norm(vec.values) == 0.0) {
      fail(ErrorCode::kDegenerateVector, key + ": zero-norm embedding");
    }
    if (!supplied.insert(key).second || store(vec.space).contains(key)) {
      fail(ErrorCode::kConflict, "embedding '" + key + "' already stored");
    }
  }
}

void ObjectIndex::commit_artifacts(std::size_t position, std::vector<ViewRecord> views,
                                   std::vector<CaptionRecord> captions,
                                   KeyedEmbeddings embeddings) {
  ObjectRecord& record = objects_[position];
  for (auto& v : views) record.views.push_back(std::move(v));
  for (auto& c : captions) record.captions.push_back(std::move(c));
  std::sort(record.views.begin(), record.views.end(),
            [](const ViewRecord& a, const ViewRecord& b) { return a.view_id < b.view_id; });
  std::sort(record.captions.begin(), record.captions.end(),
            [](const CaptionRecord& a, const CaptionRecord& b) {
              return std::pair(a.view_id, a.prompt_type) < std::pair(b.view_id, b.prompt_type);
            });
  for (auto& [key, vec] : embeddings) mutable_store(vec.space).insert(std::move(key), vec.values);
  refresh_rows(position);
}

void ObjectIndex::refresh_rows(std::size_t position) {
  const ObjectRecord& record = objects_[position];
  ObjectRows rows;
  for (const auto& c : record.captions) {
    if (auto r = text_store_.find(c.embedding_key)) rows.caption_rows.push_back(*r);
  }
  for (const auto& v : record.views) {
    if (auto r = vision_store_.find(v.embedding_key)) rows.view_rows.push_back(*r);
  }
  rows_[position] = std::move(rows);
  rows_[position].complete = verify_completeness(record.model_id).complete();
}

void ObjectIndex::add_object(NewObject object) {
  check_model_id(object.model_id);
  if (contains(object.model_id)) {
    fail(ErrorCode::kConflict, "model_id '" + object.model_id + "' already present");
  }
  ObjectRecord base;
  base.model_id = object.model_id;
  check_artifacts(base, object.views, object.captions, object.embeddings);

  base.mesh_path = std::move(object.mesh_path);
  base.class_label = std::move(object.class_label);
  const std::size_t position = objects_.size();
  objects_.push_back(std::move(base));
  rows_.emplace_back();
  by_id_.emplace(object.model_id, position);
  commit_artifacts(position, std::move(object.views), std::move(object.captions),
                   std::move(object.embeddings));
}

void ObjectIndex::register_artifacts(std::string_view model_id, std::vector<ViewRecord> views,
                                     std::vector<CaptionRecord> captions,
                                     KeyedEmbeddings embeddings) {
  const std::size_t pos = position(model_id);
  check_artifacts(objects_[pos], views, captions, embeddings);
  commit_artifacts(pos, std::move(views), std::move(captions), std::move(embeddings));
}

MissingArtifacts ObjectIndex::verify_completeness(std::string_view model_id) const {
  const ObjectRecord& record = object(model_id);
  MissingArtifacts missing;
  missing.model_id = record.model_id;

  std::vector<bool> has_view(view_count_, false);
  std::vector<bool> has_caption(view_count_, false);
  for (const auto& v : record.views) has_view[v.view_id] = true;
  for (const auto& c : record.captions) {
    if (c.prompt_type == settings_.caption_prompt) has_caption[c.view_id] = true;
  }
  for (int k = 0; k < view_count_; ++k) {
    if (!has_view[k]) missing.missing_views.push_back(k);
    if (!has_caption[k]) missing.missing_captions.push_back({k, settings_.caption_prompt});
  }
  for (const auto& v : record.views) {
    if (!vision_store_.contains(v.embedding_key)) missing.missing_embeddings.push_back(v.embedding_key);
  }
  for (const auto& c : record.captions) {
    if (!text_store_.contains(c.embedding_key)) missing.missing_embeddings.push_back(c.embedding_key);
  }
  return missing;
}

void ObjectIndex::erase_class_labels() {
  for (auto& o : objects_) o.class_label.reset();
}

bool operator==(const ObjectIndex& a, const ObjectIndex& b) {
  return a.view_count_ == b.view_count_ && a.settings_ == b.settings_ &&
         a.objects_ == b.objects_ && a.text_store_ == b.text_store_ &&
         a.vision_store_ == b.vision_store_;
}

}  // namespace oscar
