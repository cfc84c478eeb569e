#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace oscar {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);

/// Unicode NFC normalization of UTF-8 text. Errors: invalid UTF-8 ->
/// invalid-input.
std::string nfc_normalize(std::string_view utf8);

/// Cache key of a caption or prompt: SHA-256 of its NFC form.
std::string text_cache_key(std::string_view utf8);
/// Cache key of an image: SHA-256 of the raw encoded bytes.
std::string image_cache_key(std::span<const std::byte> image_bytes);

std::string base64_encode(std::span<const std::byte> bytes);

inline std::span<const std::byte> as_bytes(std::string_view s) {
  return std::as_bytes(std::span<const char>(s.data(), s.size()));
}

}  // namespace oscar
