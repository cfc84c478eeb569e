#pragma once

#include <span>

#include "oscar/embedding.hpp"

namespace oscar {

// Float inputs, double accumulation in index order.
double dot(std::span<const float> a, std::span<const float> b);
double l2_norm(std::span<const float> a);

/// <a,b> / (|a| |b|). Errors: dimension mismatch -> invalid-argument; a zero
/// norm on either side -> degenerate-vector.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace oscar
