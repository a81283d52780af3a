#pragma once

// Whole-image distortion synthesis and rectification by inverse mapping.
//
// Pixel (col, row) maps to normalized coordinates centered on the image
// center with unit = half the image diagonal, so corner pixel centers sit at
// radius exactly 1. Because every model is radial, the source of an output
// pixel p is c + k(r) * (p - c), with k the model's radial scale.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radialkit/geometry.hpp"
#include "radialkit/image.hpp"

namespace radialkit {

enum class WarpDirection {
    /// Output is the distorted image; sources come from the undistort map.
    synthesize_distortion,
    /// Output is the undistorted image; sources come from the distort map.
    rectify,
};

enum class Interpolation { bilinear, nearest };

struct FillPolicy {
    enum class Kind { constant, edge_clamp };
    Kind kind = Kind::constant;
    std::uint8_t value = 0;

    static FillPolicy constant(std::uint8_t value) { return {Kind::constant, value}; }
    static FillPolicy edge_clamp() { return {Kind::edge_clamp, 0}; }

    friend bool operator==(const FillPolicy&, const FillPolicy&) = default;
};

struct WarpSpec {
    DistortionModel model;
    WarpDirection direction = WarpDirection::synthesize_distortion;
    Interpolation interpolation = Interpolation::bilinear;
    FillPolicy fill;
};

class PixelFrame {
public:
    PixelFrame(int width, int height);

    double center_x() const noexcept { return cx_; }
    double center_y() const noexcept { return cy_; }
    /// Pixels per normalized unit (half the diagonal between corner pixel centers).
    double scale() const noexcept { return scale_; }

    NormPoint to_norm(double col, double row) const noexcept;
    void to_pixel(NormPoint p, double& col, double& row) const noexcept;

private:
    double cx_;
    double cy_;
    double scale_;
};

enum class SampleStatus : std::uint8_t { inside, outside, domain_error };

struct Displacement {
    double dx = 0.0;
    double dy = 0.0;
};

/// Per-output-pixel vector to its source sample, in pixels. Pixels whose
/// source is undefined (domain error) carry a NaN vector.
class DisplacementField {
public:
    DisplacementField(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    const Displacement& at(int x, int y) const { return vectors_[index(x, y)]; }
    SampleStatus status(int x, int y) const { return status_[index(x, y)]; }

    /// Fraction of pixels whose source is outside the frame or undefined.
    double fill_fraction() const;
    std::size_t filled_count() const;
    /// Mean displacement magnitude over a region, skipping domain errors.
    double mean_magnitude(const Rect& region) const;
    double mean_magnitude() const { return mean_magnitude({0, 0, width_, height_}); }

private:
    friend DisplacementField displacement_field(const WarpSpec&, int, int);

    std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width_ + x; }

    int width_;
    int height_;
    std::vector<Displacement> vectors_;
    std::vector<SampleStatus> status_;
};

struct WarpResult {
    ImageBuffer image;
    std::size_t filled_pixels = 0;  // out-of-frame or undefined sources
    std::size_t domain_errors = 0;  // subset of filled_pixels
    double fill_fraction = 0.0;
};

/// Output has the input's dimensions. Bit-identical for any `jobs`.
WarpResult warp(const ImageBuffer& img, const WarpSpec& spec, int jobs = 1);

DisplacementField displacement_field(const WarpSpec& spec, int width, int height);

/// |1 - s(1)/s(0)| with s(r) = r_u(r)/r. KB variants whose domain ends
/// before r = 1 are evaluated at the domain boundary.
double magnification_rate(const DistortionModel& model);

inline constexpr double kMagnificationLimit = 0.07;

inline bool magnification_compliant(const DistortionModel& model, double limit = kMagnificationLimit) {
    return magnification_rate(model) <= limit;
}

}  // namespace radialkit
