#include "oscar/index_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "oscar/error.hpp"
#include "oscar/hashing.hpp"
#include "oscar/serialization.hpp"

namespace oscar {

namespace fs = std::filesystem;

std::uint32_t crc32_of(std::span<const std::byte> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset),
                static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

constexpr std::size_t kHeaderSize = 32;  // magic(16) space(4) dim(4) rows(8)

template <typename T>
T byteswap(T value) {
  if constexpr (sizeof(T) == 4) return __builtin_bswap32(value);
  else return __builtin_bswap64(value);
}

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  if constexpr (std::endian::native == std::endian::big) value = byteswap(value);
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get_le(std::span<const std::byte> in, std::size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) value = byteswap(value);
  return value;
}

std::uint32_t space_tag(Space space) { return space == Space::kTextAligned ? 0u : 1u; }

std::vector<std::byte> encode_store(const EmbeddingStore& store) {
  std::vector<std::byte> out;
  out.reserve(kHeaderSize + store.data().size() * sizeof(float));
  const auto* magic = reinterpret_cast<const std::byte*>(kEmbeddingMagic);
  out.insert(out.end(), magic, magic + sizeof(kEmbeddingMagic));
  put_le<std::uint32_t>(out, space_tag(store.space()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dim()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(store.rows()));
  for (float x : store.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  return out;
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", v);
  return buf;
}

void write_file_atomically(const fs::path& path, std::span<const std::byte> bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::kIntegrity, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<std::byte> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIntegrity, "missing embedding file " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) fail(ErrorCode::kIntegrity, "cannot read " + path.string());
  return bytes;
}

json settings_to_json(const OnboardingSettings& s) {
  return {{"elevations_deg", s.elevations_deg},
          {"radius", s.radius},
          {"image_size", s.image_size},
          {"background_rgb", s.background_rgb},
          {"caption_prompt", to_string(s.caption_prompt)}};
}

OnboardingSettings settings_from_json(const json& j) {
  OnboardingSettings s;
  s.elevations_deg = j.at("elevations_deg").get<std::vector<double>>();
  s.radius = j.at("radius").get<double>();
  s.image_size = j.at("image_size").get<std::array<int, 2>>();
  s.background_rgb = j.at("background_rgb").get<std::array<std::uint8_t, 3>>();
  s.caption_prompt = parse_prompt_type(j.at("caption_prompt").get<std::string>());
  return s;
}

json object_to_json(const ObjectRecord& o) {
  json views = json::array();
  for (const auto& v : o.views) {
    views.push_back({{"view_id", v.view_id},
                     {"pose", to_json(v.pose)},
                     {"image_path", v.image_path},
                     {"embedding_key", v.embedding_key}});
  }
  json captions = json::array();
  for (const auto& c : o.captions) {
    captions.push_back({{"view_id", c.view_id},
                        {"prompt_type", to_string(c.prompt_type)},
                        {"text", c.text},
                        {"embedding_key", c.embedding_key}});
  }
  return {{"model_id", o.model_id},
          {"mesh_path", o.mesh_path ? json(*o.mesh_path) : json(nullptr)},
          {"class_label", o.class_label ? json(*o.class_label) : json(nullptr)},
          {"views", std::move(views)},
          {"captions", std::move(captions)}};
}

}  // namespace

void save_index(const ObjectIndex& index, const fs::path& directory) {
  fs::create_directories(directory);
  json files = json::object();
  std::vector<std::string> live;
  for (Space space : kAllSpaces) {
    const EmbeddingStore& store = index.store(space);
    const auto bytes = encode_store(store);
    const std::uint32_t crc = crc32_of(bytes);
    const std::string name = std::string(to_string(space)) + "-" + hex32(crc) + ".bin";
    write_file_atomically(directory / name, bytes);
    live.push_back(name);
    files[std::string(to_string(space))] = {{"path", name},
                                            {"crc32", crc},
                                            {"dim", store.dim()},
                                            {"rows", store.rows()},
                                            {"keys", store.keys()}};
  }
  json objects = json::array();
  for (const auto& o : index.objects()) objects.push_back(object_to_json(o));

  const json manifest = {{"format", "oscar-index"},
                         {"manifest_version", index.manifest_version()},
                         {"dims",
                          {{"text_aligned", index.dim(Space::kTextAligned)},
                           {"vision_only", index.dim(Space::kVisionOnly)}}},
                         {"K", index.view_count()},
                         {"onboarding", settings_to_json(index.settings())},
                         {"files", std::move(files)},
                         {"objects", std::move(objects)}};
  const std::string text = manifest.dump(2) + "\n";
  write_file_atomically(directory / kManifestFileName, as_bytes(text));

  // Drop embedding files of earlier commits.
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() == ".bin" &&
        std::find(live.begin(), live.end(), name) == live.end()) {
      std::error_code ec;
      fs::remove(entry.path(), ec);
    }
  }
}

namespace {

EmbeddingStore decode_store(Space space, const fs::path& directory, const json& entry,
                            std::size_t expected_dim) {
  const std::string name = entry.at("path").get<std::string>();
  const auto bytes = read_file(directory / name);
  if (crc32_of(bytes) != entry.at("crc32").get<std::uint32_t>()) {
    fail(ErrorCode::kIntegrity, name + ": checksum mismatch");
  }
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kEmbeddingMagic, sizeof(kEmbeddingMagic)) != 0) {
    fail(ErrorCode::kIntegrity, name + ": bad header");
  }
  const auto tag = get_le<std::uint32_t>(bytes, 16);
  const auto dim = get_le<std::uint32_t>(bytes, 20);
  const auto rows = get_le<std::uint64_t>(bytes, 24);
  const auto keys = entry.at("keys").get<std::vector<std::string>>();
  if (tag != space_tag(space) || dim != expected_dim || rows != keys.size() ||
      bytes.size() != kHeaderSize + rows * dim * sizeof(float)) {
    fail(ErrorCode::kIntegrity, name + ": header does not match the manifest");
  }
  EmbeddingStore store(space, dim);
  store.reserve(rows);
  std::vector<float> row(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      row[d] = std::bit_cast<float>(
          get_le<std::uint32_t>(bytes, kHeaderSize + (r * dim + d) * sizeof(float)));
    }
    store.insert(keys[r], row);
  }
  return store;
}

std::string model_of_key(const std::string& key) { return key.substr(0, key.find('/')); }

}  // namespace

ObjectIndex load_index(const fs::path& directory) {
  const fs::path manifest_path = directory / kManifestFileName;
  if (!fs::exists(manifest_path)) {
    fail(ErrorCode::kNotFound, "no index manifest in " + directory.string());
  }
  std::ifstream in(manifest_path);
  json manifest = json::parse(in, nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    fail(ErrorCode::kIntegrity, manifest_path.string() + ": malformed manifest");
  }
  const int version = manifest.value("manifest_version", -1);
  if (version != kManifestVersion) {
    fail(ErrorCode::kUnsupportedVersion,
         "manifest_version " + std::to_string(version) + " is not supported (expected " +
             std::to_string(kManifestVersion) + ")");
  }

  try {
    const auto& dims = manifest.at("dims");
    ObjectIndex index(dims.at("text_aligned").get<int>(), dims.at("vision_only").get<int>(),
                      manifest.at("K").get<int>(), settings_from_json(manifest.at("onboarding")));

    // model_id -> embeddings, in file order.
    std::map<std::string, KeyedEmbeddings> by_model;
    for (Space space : kAllSpaces) {
      const auto store = decode_store(space, directory,
                                      manifest.at("files").at(std::string(to_string(space))),
                                      index.dim(space));
      for (std::size_t r = 0; r < store.rows(); ++r) {
        const auto row = store.row(r);
        by_model[model_of_key(store.key(r))].emplace_back(
            store.key(r), EmbeddingVector{space, {row.begin(), row.end()}});
      }
    }

    for (const auto& o : manifest.at("objects")) {
      NewObject obj;
      obj.model_id = o.at("model_id").get<std::string>();
      if (!o.at("mesh_path").is_null()) obj.mesh_path = o.at("mesh_path").get<std::string>();
      if (!o.at("class_label").is_null()) obj.class_label = o.at("class_label").get<std::string>();
      for (const auto& v : o.at("views")) {
        obj.views.push_back({v.at("view_id").get<int>(), camera_pose_from_json(v.at("pose")),
                             v.at("image_path").get<std::string>(),
                             v.at("embedding_key").get<std::string>()});
      }
      for (const auto& c : o.at("captions")) {
        obj.captions.push_back({c.at("view_id").get<int>(),
                                parse_prompt_type(c.at("prompt_type").get<std::string>()),
                                c.at("text").get<std::string>(),
                                c.at("embedding_key").get<std::string>()});
      }
      if (auto it = by_model.find(obj.model_id); it != by_model.end()) {
        obj.embeddings = std::move(it->second);
        by_model.erase(it);
      }
      index.add_object(std::move(obj));
    }
    if (!by_model.empty()) {
      fail(ErrorCode::kIntegrity,
           "embedding rows for unknown model '" + by_model.begin()->first + "'");
    }
    return index;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIntegrity, manifest_path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIntegrity) throw;
    fail(ErrorCode::kIntegrity, manifest_path.string() + ": " + e.what());
  }
}

}  // namespace oscar
