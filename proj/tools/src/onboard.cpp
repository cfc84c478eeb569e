#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include "common.hpp"
#include "oscar/error.hpp"
#include "oscar/geometry.hpp"
#include "oscar/index_io.hpp"

namespace oscar::cli {
namespace {

namespace fs = std::filesystem;

struct ModelSpec {
  std::string model_id;
  std::optional<std::string> mesh_path;
  std::optional<std::string> class_label;
  std::map<int, std::string> view_images;
  std::map<std::pair<int, PromptType>, std::string> captions;
};

struct ModelsManifest {
  std::optional<SpaceDims> dims;
  std::optional<int> view_count;
  OnboardingSettings settings;
  std::optional<PromptType> caption_prompt;
  std::vector<ModelSpec> models;
};

ModelsManifest parse_manifest(const json& j) {
  ModelsManifest m;
  try {
    if (j.contains("dims")) {
      m.dims = SpaceDims{j.at("dims").at("text_aligned").get<std::size_t>(),
                         j.at("dims").at("vision_only").get<std::size_t>()};
    }
    if (j.contains("K")) m.view_count = j.at("K").get<int>();
    if (j.contains("elevations_deg")) m.settings.elevations_deg = j.at("elevations_deg").get<std::vector<double>>();
    if (j.contains("radius")) m.settings.radius = j.at("radius").get<double>();
    if (j.contains("image_size")) m.settings.image_size = j.at("image_size").get<std::array<int, 2>>();
    if (j.contains("background_rgb")) {
      m.settings.background_rgb = j.at("background_rgb").get<std::array<std::uint8_t, 3>>();
    }
    if (j.contains("caption_prompt")) {
      m.caption_prompt = parse_prompt_type(j.at("caption_prompt").get<std::string>());
    }
    for (const auto& jm : j.at("models")) {
      ModelSpec spec;
      spec.model_id = jm.at("model_id").get<std::string>();
      if (jm.contains("mesh_path")) spec.mesh_path = jm.at("mesh_path").get<std::string>();
      if (jm.contains("class_label")) spec.class_label = jm.at("class_label").get<std::string>();
      for (const auto& v : jm.value("views", json::array())) {
        spec.view_images[v.at("view_id").get<int>()] = v.at("image_path").get<std::string>();
      }
      for (const auto& c : jm.value("captions", json::array())) {
        const PromptType type = c.contains("prompt_type")
                                    ? parse_prompt_type(c.at("prompt_type").get<std::string>())
                                    : kDefaultPromptType;
        spec.captions[{c.at("view_id").get<int>(), type}] = c.at("text").get<std::string>();
      }
      m.models.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed models manifest: ") + e.what());
  }
  return m;
}

ObjectIndex open_or_create(const OnboardOptions& options, const ModelsManifest& manifest,
                           bool& created) {
  std::optional<PromptType> prompt;
  if (options.prompt_type) prompt = parse_prompt_type(*options.prompt_type);
  else if (manifest.caption_prompt) prompt = manifest.caption_prompt;

  if (fs::exists(options.index_dir / kManifestFileName)) {
    created = false;
    ObjectIndex index = load_index(options.index_dir);
    if (prompt && *prompt != index.settings().caption_prompt) {
      fail(ErrorCode::kInvalidArgument,
           "index captions use prompt type '" +
               std::string(to_string(index.settings().caption_prompt)) + "', not '" +
               std::string(to_string(*prompt)) + "'");
    }
    if (manifest.dims && (manifest.dims->text_aligned != index.dim(Space::kTextAligned) ||
                          manifest.dims->vision_only != index.dim(Space::kVisionOnly))) {
      fail(ErrorCode::kInvalidArgument, "models manifest dims disagree with the index");
    }
    if (manifest.view_count && *manifest.view_count != index.view_count()) {
      fail(ErrorCode::kInvalidArgument, "models manifest K disagrees with the index");
    }
    return index;
  }

  created = true;
  SpaceDims dims;
  if (manifest.dims) {
    dims = *manifest.dims;
  } else if (options.provider.kind == "remote") {
    dims = fetch_sidecar_dims(make_descriptor(options.provider));
  } else {
    fail(ErrorCode::kInvalidArgument, "new index: the models manifest must declare \"dims\"");
  }
  OnboardingSettings settings = manifest.settings;
  if (prompt) settings.caption_prompt = *prompt;
  const int k = manifest.view_count.value_or(kDefaultViewCount);
  // Rejects viewpoint settings that cannot be rendered before anything is written.
  (void)generate_viewpoints(k, settings.elevations_deg, settings.radius);
  return create_index(static_cast<int>(dims.text_aligned), static_cast<int>(dims.vision_only), k,
                      settings);
}

void print_missing(const MissingArtifacts& m, std::ostream& out) {
  out << "incomplete " << m.model_id << ":";
  if (!m.missing_views.empty()) {
    out << " views [";
    for (std::size_t i = 0; i < m.missing_views.size(); ++i) out << (i ? "," : "") << m.missing_views[i];
    out << "]";
  }
  if (!m.missing_captions.empty()) {
    out << " captions [";
    for (std::size_t i = 0; i < m.missing_captions.size(); ++i) {
      out << (i ? "," : "") << m.missing_captions[i].view_id << "/"
          << to_string(m.missing_captions[i].prompt_type);
    }
    out << "]";
  }
  if (!m.missing_embeddings.empty()) {
    out << " embeddings [";
    for (std::size_t i = 0; i < m.missing_embeddings.size(); ++i) {
      out << (i ? "," : "") << m.missing_embeddings[i];
    }
    out << "]";
  }
  out << '\n';
}

// Artifacts produced for one model before they are registered together.
struct Batch {
  std::vector<ViewRecord> views;
  std::vector<CaptionRecord> captions;
  KeyedEmbeddings embeddings;
  std::size_t size() const { return views.size() + captions.size() + embeddings.size(); }
};

class Onboarder {
 public:
  Onboarder(ObjectIndex& index, LazyProvider& provider, fs::path base_dir, std::ostream& err)
      : index_(index), provider_(provider), base_dir_(std::move(base_dir)), err_(err),
        poses_(generate_viewpoints(index.view_count(), index.settings().elevations_deg,
                                   index.settings().radius)) {}

  // Returns the number of artifacts registered. A provider outage
  // propagates after the artifacts gathered so far have been registered.
  std::size_t run(const ModelSpec& spec, std::vector<RenderJob>& jobs) {
    if (!index_.contains(spec.model_id)) {
      index_.add_object({spec.model_id, spec.mesh_path, spec.class_label, {}, {}, {}});
      ++added_;
    }
    const MissingArtifacts missing = index_.verify_completeness(spec.model_id);
    if (missing.complete()) return 0;

    Batch batch;
    try {
      gather(spec, missing, batch, jobs);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kProviderUnavailable) commit(spec.model_id, batch);
      throw;
    }
    const std::size_t produced = batch.size();
    commit(spec.model_id, batch);
    return produced;
  }

  std::size_t added() const { return added_; }

 private:
  void commit(const std::string& model_id, Batch& batch) {
    if (batch.size() == 0) return;
    index_.register_artifacts(model_id, std::move(batch.views), std::move(batch.captions),
                              std::move(batch.embeddings));
  }

  fs::path resolve(const std::string& path) const {
    fs::path p(path);
    return p.is_relative() ? base_dir_ / p : p;
  }

  std::optional<std::string> image_of(const ModelSpec& spec, const ObjectRecord& record, int view) const {
    for (const auto& v : record.views) {
      if (v.view_id == view && !v.image_path.empty()) return v.image_path;
    }
    auto it = spec.view_images.find(view);
    if (it != spec.view_images.end()) return it->second;
    return std::nullopt;
  }

  // Calls `f`; cache misses, undecodable inputs and unsupported
  // operations leave the artifact missing instead of aborting the model.
  template <typename F>
  bool attempt(const std::string& what, F&& f) {
    try {
      f();
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNotFound || e.code() == ErrorCode::kInvalidInput ||
          e.code() == ErrorCode::kUnsupportedOperation) {
        err_ << "warning: " << what << ": " << e.what() << '\n';
        return false;
      }
      throw;
    }
  }

  void gather(const ModelSpec& spec, const MissingArtifacts& missing, Batch& batch,
              std::vector<RenderJob>& jobs) {
    const ObjectRecord& record = index_.object(spec.model_id);
    const std::string& id = spec.model_id;

    RenderJob job;
    job.model_id = id;
    job.mesh_path = record.mesh_path ? record.mesh_path : spec.mesh_path;
    job.image_size = index_.settings().image_size;
    job.background_rgb = index_.settings().background_rgb;
    for (int view : missing.missing_views) {
      auto it = spec.view_images.find(view);
      if (it != spec.view_images.end() && fs::exists(resolve(it->second))) {
        batch.views.push_back({view, poses_[view], it->second, view_embedding_key(id, view)});
      } else {
        job.view_ids.push_back(view);
        job.poses.push_back(poses_[view]);
      }
    }
    if (!job.view_ids.empty()) jobs.push_back(std::move(job));

    std::set<int> rendered;
    for (const auto& v : record.views) rendered.insert(v.view_id);
    for (const auto& v : batch.views) rendered.insert(v.view_id);

    for (const auto& mc : missing.missing_captions) {
      const std::string key = caption_embedding_key(id, mc.view_id, mc.prompt_type);
      auto it = spec.captions.find({mc.view_id, mc.prompt_type});
      if (it != spec.captions.end() && !it->second.empty()) {
        batch.captions.push_back({mc.view_id, mc.prompt_type, it->second, key});
        continue;
      }
      const auto image = image_of(spec, record, mc.view_id);
      if (!image || !rendered.count(mc.view_id)) continue;  // caption after rendering
      attempt(key, [&] {
        const std::string text = provider_.get().caption_image(read_bytes(resolve(*image)), mc.prompt_type);
        batch.captions.push_back({mc.view_id, mc.prompt_type, text, key});
      });
    }

    std::vector<std::string> wanted = missing.missing_embeddings;
    for (const auto& v : batch.views) wanted.push_back(v.embedding_key);
    for (const auto& c : batch.captions) wanted.push_back(c.embedding_key);
    for (const auto& key : wanted) embed(spec, record, batch, key);
  }

  void embed(const ModelSpec& spec, const ObjectRecord& record, Batch& batch, const std::string& key) {
    for (const auto& list : {std::cref(record.captions), std::cref(batch.captions)}) {
      for (const auto& c : list.get()) {
        if (c.embedding_key != key) continue;
        attempt(key, [&] {
          const std::vector<std::string> texts{c.text};
          batch.embeddings.emplace_back(key, provider_.get().embed_texts(texts).front());
        });
        return;
      }
    }
    for (const auto& list : {std::cref(record.views), std::cref(batch.views)}) {
      for (const auto& v : list.get()) {
        if (v.embedding_key != key) continue;
        const auto image = image_of(spec, record, v.view_id);
        if (!image) {
          err_ << "warning: " << key << ": no image to embed\n";
          return;
        }
        attempt(key, [&] {
          batch.embeddings.emplace_back(
              key, provider_.get().embed_image(read_bytes(resolve(*image)), Space::kVisionOnly));
        });
        return;
      }
    }
  }

  ObjectIndex& index_;
  LazyProvider& provider_;
  fs::path base_dir_;
  std::ostream& err_;
  std::vector<CameraPose> poses_;
  std::size_t added_ = 0;
};

void write_jobs(const fs::path& path, const std::vector<RenderJob>& jobs) {
  std::string text;
  for (const auto& job : jobs) text += oscar::to_json(job).dump() + "\n";
  write_file_atomic(path, text);
}

}  // namespace

int cmd_onboard(const OnboardOptions& options, std::ostream& out, std::ostream& err) {
  const auto records = read_json_records(options.models_manifest);
  if (records.size() != 1) fail(ErrorCode::kInvalidArgument, "models manifest must be one JSON object");
  const ModelsManifest manifest = parse_manifest(records.front());

  bool created = false;
  ObjectIndex index = open_or_create(options, manifest, created);
  LazyProvider provider(options.provider, dims_of(index));
  Onboarder onboarder(index, provider, options.models_manifest.parent_path(), err);

  std::vector<RenderJob> jobs;
  std::size_t generated = 0;
  int status = kExitOk;
  for (const auto& spec : manifest.models) {
    try {
      generated += onboarder.run(spec, jobs);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kProviderUnavailable) throw;
      err << "error: " << e.what() << "; committing partial progress\n";
      status = kExitConfig;
      break;
    }
  }

  if (generated > 0 || onboarder.added() > 0 || created) save_index(index, options.index_dir);
  const fs::path jobs_path =
      options.render_jobs.empty() ? options.index_dir / "render_jobs.jsonl" : options.render_jobs;
  if (!jobs.empty()) {
    write_jobs(jobs_path, jobs);
    out << jobs.size() << " render job(s) written to " << jobs_path.string() << '\n';
  }

  std::size_t incomplete = 0;
  for (const auto& spec : manifest.models) {
    if (!index.contains(spec.model_id)) continue;
    const MissingArtifacts m = index.verify_completeness(spec.model_id);
    if (!m.complete()) {
      ++incomplete;
      print_missing(m, out);
    }
  }
  out << generated << " artifacts generated; " << index.size() << " objects, "
      << index.complete_count() << " complete\n";
  if (status != kExitOk) return status;
  return incomplete == 0 ? kExitOk : kExitPartial;
}

}  // namespace oscar::cli
