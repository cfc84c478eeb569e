#include "common.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "oscar/error.hpp"

namespace oscar::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConflict:
    case ErrorCode::kNotFound:
    case ErrorCode::kIntegrity:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kProviderUnavailable:
    case ErrorCode::kUnsupportedOperation:
    case ErrorCode::kEmptyIndex:
      return kExitConfig;
    default:
      return kExitPartial;
  }
}

ProviderDescriptor make_descriptor(const ProviderOptions& options) {
  ProviderDescriptor d;
  if (options.kind == "file") {
    d.kind = ProviderKind::kFileBased;
  } else if (options.kind == "remote") {
    d.kind = ProviderKind::kRemote;
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown provider '" + options.kind + "' (file, remote)");
  }
  d.endpoint = options.endpoint;
  d.cache_dir = options.cache_dir;
  d.timeout_ms = options.timeout_ms;
  d.max_in_flight = options.max_in_flight;
  validate(d);
  return d;
}

json to_json(const ProviderOptions& options) {
  json j = {{"kind", options.kind}};
  if (options.kind == "remote") {
    j["endpoint"] = options.endpoint.value_or("");
    j["timeout_ms"] = options.timeout_ms;
    j["max_in_flight"] = options.max_in_flight;
  } else {
    j["cache_dir"] = options.cache_dir.string();
  }
  return j;
}

const EmbeddingProvider& LazyProvider::get() {
  if (!provider_) {
    if (options_.kind == "file" && options_.cache_dir.empty()) {
      fail(ErrorCode::kInvalidArgument, "the file provider needs --cache");
    }
    provider_ = make_provider(make_descriptor(options_), dims_);
  }
  return *provider_;
}

SpaceDims dims_of(const ObjectIndex& index) {
  return {index.dim(Space::kTextAligned), index.dim(Space::kVisionOnly)};
}

std::vector<std::byte> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<std::byte>(raw[i]);
  return out;
}

namespace {

EmbeddingVector by_key(LazyProvider& provider, Space space, const std::string& key) {
  const auto* files = dynamic_cast<const FileBasedProvider*>(&provider.get());
  if (!files) {
    fail(ErrorCode::kUnsupportedOperation,
         "cache keys in queries need the file provider; send roi_image to a remote provider");
  }
  return files->lookup(space, key);
}

}  // namespace

Query resolve_query(const QuerySpec& spec, LazyProvider& provider,
                    const std::filesystem::path& base_dir) {
  Query q = spec.query;
  std::vector<std::byte> roi;
  auto roi_bytes = [&]() -> const std::vector<std::byte>& {
    if (roi.empty()) {
      std::filesystem::path p(*spec.roi_image);
      if (p.is_relative()) p = base_dir / p;
      roi = read_bytes(p);
    }
    return roi;
  };
  auto fill = [&](EmbeddingVector& target, Space space, const std::optional<std::string>& key,
                  const char* name) {
    if (!target.values.empty()) return;
    if (key) {
      target = by_key(provider, space, *key);
    } else if (spec.roi_image) {
      target = provider.get().embed_image(roi_bytes(), space);
    } else {
      fail(ErrorCode::kInvalidArgument, std::string("query has no ") + name + ", " + name +
                                            "_key or roi_image");
    }
  };
  fill(q.q_clip, Space::kTextAligned, spec.q_clip_key, "q_clip");
  fill(q.q_dino, Space::kVisionOnly, spec.q_dino_key, "q_dino");
  return q;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) fail(ErrorCode::kInvalidArgument, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json run_stamp(json config, int manifest_version) {
  return {{"config", std::move(config)}, {"manifest_version", manifest_version}};
}

std::string format_number(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

}  // namespace oscar::cli
