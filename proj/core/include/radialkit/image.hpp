#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace radialkit {

/// Axis-aligned pixel rectangle, half-open: [x, x + width) x [y, y + height).
struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Row-major interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels.
class ImageBuffer {
public:
    ImageBuffer() = default;
    /// Zero-filled image. Throws InvalidArgument on bad dimensions.
    ImageBuffer(int width, int height, int channels);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    Rect frame() const noexcept { return {0, 0, width_, height_}; }

    std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

    std::span<const std::uint8_t> row(int y) const {
        return {data_.data() + index(0, y, 0), static_cast<std::size_t>(width_) * channels_};
    }
    std::span<std::uint8_t> row(int y) {
        return {data_.data() + index(0, y, 0), static_cast<std::size_t>(width_) * channels_};
    }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<std::uint8_t> data_;
};

/// Rec. 601 luma in [0, 255]; the sample itself for gray images.
double luminance(const ImageBuffer& img, int x, int y);

bool contains(const Rect& outer, const Rect& inner);

/// Centered rectangle covering `fraction` of each side (rounded to pixels).
Rect central_region(int width, int height, double fraction);

/// Peak signal-to-noise ratio over a region, all channels. Returns +infinity
/// when the region is identical. Throws InvalidArgument on size mismatch or a
/// region outside the frame.
double psnr(const ImageBuffer& a, const ImageBuffer& b, const Rect& region);
double psnr(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace radialkit
