#include "oscar/embedding.hpp"

#include <cmath>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

std::string_view to_string(Space space) {
  return space == Space::kTextAligned ? "text_aligned" : "vision_only";
}

Space parse_space(std::string_view name) {
  if (name == "text_aligned") return Space::kTextAligned;
  if (name == "vision_only") return Space::kVisionOnly;
  fail(ErrorCode::kInvalidArgument, "unknown embedding space '" + std::string(name) + "'");
}

void validate_embedding(const EmbeddingVector& v, std::size_t expected_dim,
                        std::string_view what) {
  if (v.values.empty()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + ": empty embedding");
  }
  if (v.dim() != expected_dim) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": dimension " + std::to_string(v.dim()) + " in " +
             std::string(to_string(v.space)) + " space, expected " +
             std::to_string(expected_dim));
  }
  for (float x : v.values) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::kInvalidArgument, std::string(what) + ": non-finite component");
    }
  }
}

}  // namespace oscar
