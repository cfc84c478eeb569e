#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "oscar/index.hpp"

namespace oscar {

/// Writes `manifest.json` plus one little-endian float32 row-major file per
/// embedding space. Embedding files are named after their CRC-32 and the
/// manifest is replaced last via rename, so a reader never observes a
/// half-written commit.
void save_index(const ObjectIndex& index, const std::filesystem::path& directory);

/// Errors: missing manifest -> not-found; unknown manifest_version ->
/// unsupported-version; checksum, size or header mismatch -> integrity.
ObjectIndex load_index(const std::filesystem::path& directory);

inline constexpr char kManifestFileName[] = "manifest.json";

// 16-byte file magic of embedding files.
inline constexpr char kEmbeddingMagic[16] = {'O', 'S', 'C', 'A', 'R', '-', 'E', 'M',
                                            'B', 'E', 'D', '-', 'F', '3', '2', '\0'};

std::uint32_t crc32_of(std::span<const std::byte> bytes);

}  // namespace oscar
