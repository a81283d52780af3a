#include "radialkit/warp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radialkit/parallel.hpp"

namespace radialkit {

PixelFrame::PixelFrame(int width, int height)
    : cx_((width - 1) / 2.0), cy_((height - 1) / 2.0), scale_(std::hypot(cx_, cy_)) {
    if (scale_ == 0.0) scale_ = 1.0;  // single pixel
}

NormPoint PixelFrame::to_norm(double col, double row) const noexcept {
    return {(col - cx_) / scale_, (row - cy_) / scale_};
}

void PixelFrame::to_pixel(NormPoint p, double& col, double& row) const noexcept {
    col = cx_ + p.x * scale_;
    row = cy_ + p.y * scale_;
}

namespace {

struct SourceSample {
    SampleStatus status = SampleStatus::inside;
    double x = 0.0;
    double y = 0.0;
};

bool in_frame(double x, double y, int width, int height, Interpolation interp) {
    if (interp == Interpolation::nearest) {
        const double rx = std::floor(x + 0.5);
        const double ry = std::floor(y + 0.5);
        return rx >= 0.0 && ry >= 0.0 && rx <= width - 1 && ry <= height - 1;
    }
    return x >= 0.0 && y >= 0.0 && x <= width - 1 && y <= height - 1;
}

// The one place that decides where an output pixel samples from; warp() and
// displacement_field() must agree exactly.
SourceSample locate_source(const WarpSpec& spec, const PixelFrame& frame, int col, int row, int width,
                           int height) {
    const double ox = col - frame.center_x();
    const double oy = row - frame.center_y();
    const double r = std::hypot(ox, oy) / frame.scale();
    const auto k = spec.direction == WarpDirection::synthesize_distortion ? spec.model.try_undistort_scale(r)
                                                                          : spec.model.try_distort_scale(r);
    if (!k) return {SampleStatus::domain_error, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
    SourceSample s;
    s.x = frame.center_x() + *k * ox;
    s.y = frame.center_y() + *k * oy;
    s.status = in_frame(s.x, s.y, width, height, spec.interpolation) ? SampleStatus::inside : SampleStatus::outside;
    return s;
}

std::uint8_t round_sample(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

void sample_nearest(const ImageBuffer& img, double x, double y, std::uint8_t* out) {
    const int ix = std::clamp(static_cast<int>(std::floor(x + 0.5)), 0, img.width() - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(y + 0.5)), 0, img.height() - 1);
    for (int c = 0; c < img.channels(); ++c) out[c] = img.at(ix, iy, c);
}

void sample_bilinear(const ImageBuffer& img, double x, double y, std::uint8_t* out) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    for (int c = 0; c < img.channels(); ++c) {
        const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
        const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
        out[c] = round_sample((1.0 - fy) * top + fy * bottom);
    }
}

}  // namespace

WarpResult warp(const ImageBuffer& img, const WarpSpec& spec, int jobs) {
    const int width = img.width();
    const int height = img.height();
    const int channels = img.channels();
    const PixelFrame frame(width, height);

    ImageBuffer out(width, height, channels);
    std::vector<std::size_t> filled(static_cast<std::size_t>(height), 0);
    std::vector<std::size_t> undefined(static_cast<std::size_t>(height), 0);

    parallel_for(static_cast<std::size_t>(height), jobs, [&](std::size_t row_index) {
        const int row = static_cast<int>(row_index);
        auto dst = out.row(row);
        for (int col = 0; col < width; ++col) {
            std::uint8_t* px = dst.data() + static_cast<std::size_t>(col) * channels;
            const SourceSample src = locate_source(spec, frame, col, row, width, height);
            if (src.status != SampleStatus::inside) {
                ++filled[row_index];
                if (src.status == SampleStatus::domain_error) ++undefined[row_index];
                if (src.status == SampleStatus::domain_error || spec.fill.kind == FillPolicy::Kind::constant) {
                    std::fill(px, px + channels, spec.fill.value);
                    continue;
                }
            }
            if (spec.interpolation == Interpolation::nearest) {
                sample_nearest(img, src.x, src.y, px);
            } else {
                sample_bilinear(img, src.x, src.y, px);
            }
        }
    });

    WarpResult result{std::move(out), 0, 0, 0.0};
    for (std::size_t r = 0; r < filled.size(); ++r) {
        result.filled_pixels += filled[r];
        result.domain_errors += undefined[r];
    }
    result.fill_fraction = static_cast<double>(result.filled_pixels) / static_cast<double>(img.pixel_count());
    return result;
}

DisplacementField::DisplacementField(int width, int height)
    : width_(width),
      height_(height),
      vectors_(static_cast<std::size_t>(width) * height),
      status_(static_cast<std::size_t>(width) * height, SampleStatus::inside) {}

std::size_t DisplacementField::filled_count() const {
    return static_cast<std::size_t>(
        std::count_if(status_.begin(), status_.end(), [](SampleStatus s) { return s != SampleStatus::inside; }));
}

double DisplacementField::fill_fraction() const {
    return static_cast<double>(filled_count()) / static_cast<double>(status_.size());
}

double DisplacementField::mean_magnitude(const Rect& region) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = region.y; y < region.y + region.height; ++y) {
        for (int x = region.x; x < region.x + region.width; ++x) {
            if (status(x, y) == SampleStatus::domain_error) continue;
            const Displacement& d = at(x, y);
            sum += std::hypot(d.dx, d.dy);
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

DisplacementField displacement_field(const WarpSpec& spec, int width, int height) {
    DisplacementField field(width, height);
    const PixelFrame frame(width, height);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const SourceSample src = locate_source(spec, frame, col, row, width, height);
            const std::size_t i = field.index(col, row);
            field.status_[i] = src.status;
            field.vectors_[i] = {src.x - col, src.y - row};
        }
    }
    return field;
}

double magnification_rate(const DistortionModel& model) {
    const double center = model.undistort_scale(0.0);
    double r = 1.0;
    if (const auto variant = model.kb_variant()) {
        if (*variant == KbVariant::orthogonal) r = std::min(r, model.focal());
        if (*variant == KbVariant::equisolid) r = std::min(r, 2.0 * model.focal());
    }
    return std::abs(1.0 - model.undistort_scale(r) / center);
}

}  // namespace radialkit
