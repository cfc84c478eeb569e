#include "oscar/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

double dot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double l2_norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kInvalidArgument, "cosine of vectors with dimensions " +
                                          std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()));
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) {
    fail(ErrorCode::kDegenerateVector, "cosine similarity of a zero-norm vector");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_similarity(a.view(), b.view());
}

}  // namespace oscar
