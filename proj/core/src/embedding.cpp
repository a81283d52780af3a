#include "radialkit/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "radialkit/errors.hpp"

namespace radialkit {

ToyEmbedding toy_embedding(const ImageBuffer& img) {
    constexpr int grid = kEmbeddingGrid;
    const int w = img.width();
    const int h = img.height();
    if (w < grid || h < grid) throw InvalidArgument("toy_embedding: image smaller than 8x8");

    ToyEmbedding e;
    for (int by = 0; by < grid; ++by) {
        const int y0 = by * h / grid;
        const int y1 = (by + 1) * h / grid;
        for (int bx = 0; bx < grid; ++bx) {
            const int x0 = bx * w / grid;
            const int x1 = (bx + 1) * w / grid;
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) sum += luminance(img, x, y);
            }
            e.values[static_cast<std::size_t>(by * grid + bx)] = sum / static_cast<double>((y1 - y0) * (x1 - x0));
        }
    }

    double mean = 0.0;
    for (const double v : e.values) mean += v;
    mean /= static_cast<double>(e.values.size());
    double norm = 0.0;
    for (double& v : e.values) {
        v -= mean;
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm <= 1e-9) {
        e.values.fill(0.0);
        e.degenerate = true;
        return e;
    }
    for (double& v : e.values) v /= norm;
    return e;
}

double cosine_similarity(const ToyEmbedding& a, const ToyEmbedding& b) {
    if (a.degenerate || b.degenerate) return 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
    return std::clamp(dot, -1.0, 1.0);
}

}  // namespace radialkit
