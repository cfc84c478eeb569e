#pragma once
// Helpers shared by the subcommands.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "oscar/cli/cli.hpp"
#include "oscar/error.hpp"
#include "oscar/index.hpp"
#include "oscar/serialization.hpp"

namespace oscar::cli {

int exit_code_for(ErrorCode code);

ProviderDescriptor make_descriptor(const ProviderOptions& options);
json to_json(const ProviderOptions& options);

/// Creates the provider on first use, so runs whose queries carry inline
/// vectors never touch the cache or the sidecar.
class LazyProvider {
 public:
  LazyProvider(ProviderOptions options, SpaceDims dims)
      : options_(std::move(options)), dims_(dims) {}
  const EmbeddingProvider& get();
  const ProviderOptions& options() const { return options_; }

 private:
  ProviderOptions options_;
  SpaceDims dims_;
  std::unique_ptr<EmbeddingProvider> provider_;
};

SpaceDims dims_of(const ObjectIndex& index);

/// Fills q_clip / q_dino from inline arrays, cache keys or the ROI image.
/// Relative ROI paths resolve against `base_dir`.
Query resolve_query(const QuerySpec& spec, LazyProvider& provider,
                    const std::filesystem::path& base_dir);

std::vector<std::byte> read_bytes(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

json run_stamp(json config, int manifest_version);

std::string format_number(double value, int digits = 6);

}  // namespace oscar::cli
