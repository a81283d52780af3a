#pragma once

// Toy face "embedding" for desk-scale recognition experiments: 8x8 block
// means of luminance, centered and scaled to unit norm.

#include <array>

#include "radialkit/image.hpp"

namespace radialkit {

inline constexpr int kEmbeddingGrid = 8;

struct ToyEmbedding {
    std::array<double, kEmbeddingGrid * kEmbeddingGrid> values{};
    /// Zero-variance input: values are all zero and similarity is undefined.
    bool degenerate = false;
};

/// Blocks partition the frame at floor(i * size / 8); needs at least 8x8 pixels.
ToyEmbedding toy_embedding(const ImageBuffer& img);

/// Dot product of the unit vectors; 0 when either side is degenerate.
double cosine_similarity(const ToyEmbedding& a, const ToyEmbedding& b);

}  // namespace radialkit
