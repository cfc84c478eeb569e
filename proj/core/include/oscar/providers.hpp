#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oscar/embedding.hpp"
#include "oscar/prompts.hpp"

namespace oscar {

enum class ProviderKind { kFileBased, kRemote };

struct SpaceDims {
  std::size_t text_aligned = 0;
  std::size_t vision_only = 0;

  std::size_t of(Space space) const {
    return space == Space::kTextAligned ? text_aligned : vision_only;
  }
};

struct ProviderDescriptor {
  ProviderKind kind = ProviderKind::kFileBased;
  std::string text_model_name;
  std::map<Space, std::string> vision_models;
  std::optional<std::string> endpoint;  // required for kRemote
  int timeout_ms = 30000;
  int max_in_flight = 4;
  std::filesystem::path cache_dir;  // kFileBased
};

// Errors: remote without endpoint, non-positive timeout or concurrency ->
// invalid-argument.
void validate(const ProviderDescriptor& descriptor);

/// Isolates all neural inference. Implementations are safe to call from
/// concurrent queries and check every vector against the declared dims.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual const ProviderDescriptor& descriptor() const = 0;
  virtual const SpaceDims& dims() const = 0;

  /// One TextAligned vector per input, in order. Errors: empty list or empty
  /// text -> invalid-argument.
  virtual std::vector<EmbeddingVector> embed_texts(
      std::span<const std::string> texts) const = 0;

  /// Errors: zero-length or undecodable image -> invalid-input.
  virtual EmbeddingVector embed_image(std::span<const std::byte> image_bytes,
                                      Space space) const = 0;

  virtual std::string caption_image(std::span<const std::byte> image_bytes,
                                    PromptType prompt_type) const = 0;

  /// Wire-name overload. Errors: unknown prompt type -> invalid-argument.
  std::string caption_image(std::span<const std::byte> image_bytes,
                            std::string_view prompt_type) const {
    return caption_image(image_bytes, parse_prompt_type(prompt_type));
  }
};

/// Content-addressed store of precomputed vectors, persisted as
/// `embeddings.jsonl` (one {"space","key","vector"} object per line) in a
/// cache directory. Text keys hash the NFC form; image keys hash raw bytes.
class EmbeddingCache {
 public:
  static constexpr char kFileName[] = "embeddings.jsonl";

  EmbeddingCache() = default;
  static EmbeddingCache load(const std::filesystem::path& directory);
  void save(const std::filesystem::path& directory) const;

  void put(Space space, std::string key, std::vector<float> values);
  void put_text(std::string_view text, std::vector<float> values);
  void put_image(std::span<const std::byte> image_bytes, Space space,
                 std::vector<float> values);

  const std::vector<float>* find(Space space, std::string_view key) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<Space, std::string>, std::vector<float>> entries_;
};

/// Pure lookup provider; referentially transparent.
class FileBasedProvider final : public EmbeddingProvider {
 public:
  FileBasedProvider(ProviderDescriptor descriptor, SpaceDims dims, EmbeddingCache cache);

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  const SpaceDims& dims() const override { return dims_; }

  std::vector<EmbeddingVector> embed_texts(
      std::span<const std::string> texts) const override;
  EmbeddingVector embed_image(std::span<const std::byte> image_bytes,
                              Space space) const override;
  /// Always unsupported-operation.
  std::string caption_image(std::span<const std::byte> image_bytes,
                            PromptType prompt_type) const override;
  using EmbeddingProvider::caption_image;

  /// Direct key lookup, as used by query files that reference cache keys.
  EmbeddingVector lookup(Space space, std::string_view key) const;

 private:
  EmbeddingVector checked(Space space, std::string_view key) const;

  ProviderDescriptor descriptor_;
  SpaceDims dims_;
  EmbeddingCache cache_;
};

/// HTTP/JSON client of the model-serving sidecar.
class RemoteProvider final : public EmbeddingProvider {
 public:
  RemoteProvider(ProviderDescriptor descriptor, SpaceDims dims);
  ~RemoteProvider() override;

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  const SpaceDims& dims() const override { return dims_; }

  std::vector<EmbeddingVector> embed_texts(
      std::span<const std::string> texts) const override;
  EmbeddingVector embed_image(std::span<const std::byte> image_bytes,
                              Space space) const override;
  std::string caption_image(std::span<const std::byte> image_bytes,
                            PromptType prompt_type) const override;
  using EmbeddingProvider::caption_image;

 private:
  std::string post(const std::string& path, const std::string& body) const;

  ProviderDescriptor descriptor_;
  SpaceDims dims_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

/// Dims advertised by the sidecar at GET /info.
/// Errors: unreachable -> provider-unavailable; malformed -> protocol.
SpaceDims fetch_sidecar_dims(const ProviderDescriptor& descriptor);

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderDescriptor& descriptor,
                                                 SpaceDims dims);

}  // namespace oscar
