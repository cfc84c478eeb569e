#include "oscar/providers.hpp"

#include <httplib.h>

#include <fstream>
#include <string>

#include "oscar/error.hpp"
#include "oscar/hashing.hpp"
#include "oscar/serialization.hpp"

namespace oscar {

void validate(const ProviderDescriptor& descriptor) {
  if (descriptor.kind == ProviderKind::kRemote &&
      (!descriptor.endpoint || descriptor.endpoint->empty())) {
    fail(ErrorCode::kInvalidArgument, "remote provider requires an endpoint");
  }
  if (descriptor.timeout_ms <= 0) fail(ErrorCode::kInvalidArgument, "timeout_ms must be positive");
  if (descriptor.max_in_flight <= 0) {
    fail(ErrorCode::kInvalidArgument, "max_in_flight must be positive");
  }
}

namespace {

void check_dim(const EmbeddingVector& v, const SpaceDims& dims, std::string_view origin) {
  const std::size_t expected = dims.of(v.space);
  if (v.dim() != expected) {
    fail(ErrorCode::kProtocol, std::string(origin) + " returned a " + std::to_string(v.dim()) +
                                   "-d " + std::string(to_string(v.space)) +
                                   " vector, index declares " + std::to_string(expected));
  }
  for (float x : v.values) {
    if (!std::isfinite(x)) fail(ErrorCode::kProtocol, std::string(origin) + " returned a non-finite value");
  }
}

void check_texts(std::span<const std::string> texts) {
  if (texts.empty()) fail(ErrorCode::kInvalidArgument, "no texts to embed");
  for (const auto& t : texts) {
    if (t.empty()) fail(ErrorCode::kInvalidArgument, "cannot embed an empty text");
  }
}

void check_image(std::span<const std::byte> image_bytes) {
  if (image_bytes.empty()) fail(ErrorCode::kInvalidInput, "empty image");
}

}  // namespace

// ---------------------------------------------------------------------------
// EmbeddingCache

EmbeddingCache EmbeddingCache::load(const std::filesystem::path& directory) {
  const auto path = directory / kFileName;
  if (!std::filesystem::exists(path)) {
    fail(ErrorCode::kNotFound, "no embedding cache at " + path.string());
  }
  EmbeddingCache cache;
  for (const auto& record : read_json_records(path)) {
    try {
      const Space space = parse_space(record.at("space").get<std::string>());
      cache.put(space, record.at("key").get<std::string>(),
                record.at("vector").get<std::vector<float>>());
    } catch (const json::exception& e) {
      fail(ErrorCode::kIntegrity, path.string() + ": " + e.what());
    }
  }
  return cache;
}

void EmbeddingCache::save(const std::filesystem::path& directory) const {
  std::filesystem::create_directories(directory);
  const auto path = directory / kFileName;
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorCode::kInvalidArgument, "cannot write " + tmp);
    for (const auto& [id, values] : entries_) {
      out << json{{"space", to_string(id.first)}, {"key", id.second}, {"vector", values}}.dump()
          << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

void EmbeddingCache::put(Space space, std::string key, std::vector<float> values) {
  entries_[{space, std::move(key)}] = std::move(values);
}

void EmbeddingCache::put_text(std::string_view text, std::vector<float> values) {
  put(Space::kTextAligned, text_cache_key(text), std::move(values));
}

void EmbeddingCache::put_image(std::span<const std::byte> image_bytes, Space space,
                               std::vector<float> values) {
  put(space, image_cache_key(image_bytes), std::move(values));
}

const std::vector<float>* EmbeddingCache::find(Space space, std::string_view key) const {
  auto it = entries_.find({space, std::string(key)});
  return it == entries_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// FileBasedProvider

FileBasedProvider::FileBasedProvider(ProviderDescriptor descriptor, SpaceDims dims,
                                     EmbeddingCache cache)
    : descriptor_(std::move(descriptor)), dims_(dims), cache_(std::move(cache)) {
  descriptor_.kind = ProviderKind::kFileBased;
  validate(descriptor_);
}

EmbeddingVector FileBasedProvider::checked(Space space, std::string_view key) const {
  const auto* values = cache_.find(space, key);
  if (!values) {
    fail(ErrorCode::kNotFound, "no cached " + std::string(to_string(space)) +
                                   " embedding for hash " + std::string(key));
  }
  EmbeddingVector v{space, *values};
  check_dim(v, dims_, "embedding cache");
  return v;
}

EmbeddingVector FileBasedProvider::lookup(Space space, std::string_view key) const {
  return checked(space, key);
}

std::vector<EmbeddingVector> FileBasedProvider::embed_texts(
    std::span<const std::string> texts) const {
  check_texts(texts);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(checked(Space::kTextAligned, text_cache_key(t)));
  return out;
}

EmbeddingVector FileBasedProvider::embed_image(std::span<const std::byte> image_bytes,
                                               Space space) const {
  check_image(image_bytes);
  return checked(space, image_cache_key(image_bytes));
}

std::string FileBasedProvider::caption_image(std::span<const std::byte>, PromptType) const {
  fail(ErrorCode::kUnsupportedOperation,
       "captioning needs a remote provider; the file-based provider only serves cached embeddings");
}

// ---------------------------------------------------------------------------
// RemoteProvider

RemoteProvider::RemoteProvider(ProviderDescriptor descriptor, SpaceDims dims)
    : descriptor_(std::move(descriptor)), dims_(dims) {
  descriptor_.kind = ProviderKind::kRemote;
  validate(descriptor_);
  in_flight_ = std::make_unique<std::counting_semaphore<>>(descriptor_.max_in_flight);
}

RemoteProvider::~RemoteProvider() = default;

namespace {

httplib::Client make_client(const ProviderDescriptor& descriptor) {
  httplib::Client client(*descriptor.endpoint);
  const auto timeout = std::chrono::milliseconds(descriptor.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

}  // namespace

std::string RemoteProvider::post(const std::string& path, const std::string& body) const {
  struct Slot {
    std::counting_semaphore<>& sem;
    explicit Slot(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~Slot() { sem.release(); }
  } slot(*in_flight_);

  auto client = make_client(descriptor_);
  auto response = client.Post(path, body, "application/json");
  if (!response) {
    fail(ErrorCode::kProviderUnavailable, "POST " + *descriptor_.endpoint + path + " failed: " +
                                              httplib::to_string(response.error()));
  }
  if (response->status >= 200 && response->status < 300) return response->body;

  std::string message = "HTTP " + std::to_string(response->status);
  const json err = json::parse(response->body, nullptr, false);
  if (!err.is_discarded() && err.is_object() && err.contains("error") && err["error"].is_object()) {
    message += " " + err["error"].value("code", std::string()) + ": " +
               err["error"].value("message", std::string());
  }
  switch (response->status) {
    case 400:
    case 413:
    case 415:
    case 422:
      fail(ErrorCode::kInvalidInput, path + ": " + message);
    case 404:
      fail(ErrorCode::kNotFound, path + ": " + message);
    default:
      fail(ErrorCode::kProviderUnavailable, path + ": " + message);
  }
}

namespace {

json parse_body(const std::string& body, const char* path) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::kProtocol, std::string(path) + ": response is not a JSON object");
  }
  return j;
}

EmbeddingVector vector_field(const json& j, Space space, const char* path) {
  if (!j.is_array()) fail(ErrorCode::kProtocol, std::string(path) + ": vector is not an array");
  EmbeddingVector v{space, {}};
  v.values.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorCode::kProtocol, std::string(path) + ": non-numeric component");
    v.values.push_back(x.get<float>());
  }
  return v;
}

void check_declared_dim(const json& j, const EmbeddingVector& v, const char* path) {
  if (!j.contains("dim") || !j["dim"].is_number_integer() ||
      j["dim"].get<std::size_t>() != v.dim()) {
    fail(ErrorCode::kProtocol, std::string(path) + ": \"dim\" does not match the vector length");
  }
}

}  // namespace

std::vector<EmbeddingVector> RemoteProvider::embed_texts(
    std::span<const std::string> texts) const {
  check_texts(texts);
  const json request = {{"texts", texts}};
  const json response = parse_body(post("/embed/text", request.dump()), "/embed/text");
  if (!response.contains("vectors") || !response["vectors"].is_array() ||
      response["vectors"].size() != texts.size()) {
    fail(ErrorCode::kProtocol, "/embed/text: expected one vector per text");
  }
  std::vector<EmbeddingVector> out;
  for (const auto& row : response["vectors"]) {
    auto v = vector_field(row, Space::kTextAligned, "/embed/text");
    check_declared_dim(response, v, "/embed/text");
    check_dim(v, dims_, "sidecar");
    out.push_back(std::move(v));
  }
  return out;
}

EmbeddingVector RemoteProvider::embed_image(std::span<const std::byte> image_bytes,
                                            Space space) const {
  check_image(image_bytes);
  const json request = {{"image_b64", base64_encode(image_bytes)}, {"space", to_string(space)}};
  const json response = parse_body(post("/embed/image", request.dump()), "/embed/image");
  if (!response.contains("vector")) fail(ErrorCode::kProtocol, "/embed/image: missing vector");
  auto v = vector_field(response["vector"], space, "/embed/image");
  check_declared_dim(response, v, "/embed/image");
  check_dim(v, dims_, "sidecar");
  return v;
}

std::string RemoteProvider::caption_image(std::span<const std::byte> image_bytes,
                                          PromptType prompt_type) const {
  check_image(image_bytes);
  const json request = {{"image_b64", base64_encode(image_bytes)},
                        {"prompt_type", to_string(prompt_type)}};
  const json response = parse_body(post("/caption", request.dump()), "/caption");
  if (!response.contains("caption") || !response["caption"].is_string() ||
      response["caption"].get<std::string>().empty()) {
    fail(ErrorCode::kProtocol, "/caption: missing or empty caption");
  }
  return response["caption"].get<std::string>();
}

SpaceDims fetch_sidecar_dims(const ProviderDescriptor& descriptor) {
  if (!descriptor.endpoint) fail(ErrorCode::kInvalidArgument, "no endpoint configured");
  auto client = make_client(descriptor);
  auto response = client.Get("/info");
  if (!response) {
    fail(ErrorCode::kProviderUnavailable, "GET " + *descriptor.endpoint + "/info failed: " +
                                              httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    fail(ErrorCode::kProviderUnavailable, "/info: HTTP " + std::to_string(response->status));
  }
  const json info = parse_body(response->body, "/info");
  const auto dim_of = [&](const char* name) -> std::size_t {
    if (!info.contains("dims") || !info["dims"].is_object() || !info["dims"].contains(name) ||
        !info["dims"][name].is_number_unsigned() || info["dims"][name].get<std::size_t>() == 0) {
      fail(ErrorCode::kProtocol, std::string("/info: missing dims.") + name);
    }
    return info["dims"][name].get<std::size_t>();
  };
  return {dim_of("text_aligned"), dim_of("vision_only")};
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderDescriptor& descriptor,
                                                 SpaceDims dims) {
  validate(descriptor);
  if (descriptor.kind == ProviderKind::kRemote) {
    return std::make_unique<RemoteProvider>(descriptor, dims);
  }
  return std::make_unique<FileBasedProvider>(descriptor, dims,
                                             EmbeddingCache::load(descriptor.cache_dir));
}

}  // namespace oscar
