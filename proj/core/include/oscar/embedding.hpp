#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oscar {

/// The two embedding spaces the engine works in: a joint vision-language
/// space (captions and ROI crops are comparable there) and a pure-vision
/// space used for view-to-ROI refinement.
enum class Space { kTextAligned, kVisionOnly };

inline constexpr Space kAllSpaces[] = {Space::kTextAligned, Space::kVisionOnly};

std::string_view to_string(Space space);
Space parse_space(std::string_view name);

struct EmbeddingVector {
  Space space = Space::kTextAligned;
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
  std::span<const float> view() const { return values; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// Throws invalid-argument on empty input, a dimension other than
// `expected_dim`, or any non-finite component.
void validate_embedding(const EmbeddingVector& v, std::size_t expected_dim,
                        std::string_view what);

}  // namespace oscar
