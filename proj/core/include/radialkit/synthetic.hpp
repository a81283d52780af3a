#pragma once

// Procedural face-like test images for desk-scale experiments: a textured
// background, a head ellipse with eyes, brows, nose and mouth. The subject
// seed fixes the layout; the capture seed adds per-shot jitter (shift,
// exposure, sensor noise) so two captures of a subject are similar but not
// identical.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radialkit/image.hpp"

namespace radialkit {

struct SyntheticFaceOptions {
    int size = 128;
    int channels = 1;
    /// Max per-capture translation in pixels.
    double jitter_px = 2.0;
    /// Std-dev of additive sensor noise in gray levels.
    double noise_sigma = 3.0;
};

ImageBuffer synthetic_face(std::uint64_t subject_seed, std::uint64_t capture_seed,
                           const SyntheticFaceOptions& options = {});

/// Smooth horizontal+vertical ramp, used for fidelity checks.
ImageBuffer gradient_image(int width, int height, int channels = 1);

/// Writes `count` images named subject_0000.png, ... into `dir` (created if
/// needed) and returns their paths in order.
std::vector<std::filesystem::path> write_toy_corpus(const std::filesystem::path& dir, int count,
                                                    std::uint64_t seed, const SyntheticFaceOptions& options = {});

}  // namespace radialkit
