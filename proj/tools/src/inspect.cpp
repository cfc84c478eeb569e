#include <ostream>

#include "common.hpp"
#include "oscar/error.hpp"
#include "oscar/index_io.hpp"

namespace oscar::cli {
namespace {

json missing_json(const MissingArtifacts& m) {
  json captions = json::array();
  for (const auto& c : m.missing_captions) {
    captions.push_back({{"view_id", c.view_id}, {"prompt_type", to_string(c.prompt_type)}});
  }
  return {{"model_id", m.model_id},
          {"missing_views", m.missing_views},
          {"missing_captions", std::move(captions)},
          {"missing_embeddings", m.missing_embeddings}};
}

json object_json(const ObjectIndex& index, const ObjectRecord& o) {
  return {{"model_id", o.model_id},
          {"mesh_path", o.mesh_path ? json(*o.mesh_path) : json(nullptr)},
          {"class_label", o.class_label ? json(*o.class_label) : json(nullptr)},
          {"views", o.views.size()},
          {"captions", o.captions.size()},
          {"complete", index.is_complete(index.position(o.model_id))},
          {"missing", missing_json(index.verify_completeness(o.model_id))}};
}

}  // namespace

int cmd_inspect(const InspectOptions& options, std::ostream& out, std::ostream& err) {
  (void)err;
  const ObjectIndex index = load_index(options.index_dir);
  const auto& s = index.settings();
  json j = {{"manifest_version", index.manifest_version()},
            {"dims",
             {{"text_aligned", index.dim(Space::kTextAligned)},
              {"vision_only", index.dim(Space::kVisionOnly)}}},
            {"K", index.view_count()},
            {"onboarding",
             {{"elevations_deg", s.elevations_deg},
              {"radius", s.radius},
              {"image_size", s.image_size},
              {"background_rgb", s.background_rgb},
              {"caption_prompt", to_string(s.caption_prompt)}}},
            {"objects", index.size()},
            {"complete", index.complete_count()}};
  if (options.model_id) j["object"] = object_json(index, index.object(*options.model_id));

  if (options.as_json) {
    out << j.dump(2) << '\n';
  } else {
    out << "manifest_version " << index.manifest_version() << "\n"
        << "dims text_aligned=" << index.dim(Space::kTextAligned)
        << " vision_only=" << index.dim(Space::kVisionOnly) << "\n"
        << "K " << index.view_count() << ", caption prompt " << to_string(s.caption_prompt) << "\n"
        << "objects " << index.size() << " (" << index.complete_count() << " complete)\n";
    const auto print = [&](const ObjectRecord& o) {
      const auto m = index.verify_completeness(o.model_id);
      out << "  " << o.model_id << ": " << o.views.size() << " views, " << o.captions.size()
          << " captions" << (o.class_label ? ", class " + *o.class_label : std::string())
          << (m.complete() ? ", complete" : ", " + std::to_string(m.count()) + " missing") << '\n';
    };
    if (options.model_id) {
      print(index.object(*options.model_id));
    } else {
      for (const auto& o : index.objects()) {
        if (!index.is_complete(index.position(o.model_id))) print(o);
      }
    }
  }
  return kExitOk;
}

}  // namespace oscar::cli
