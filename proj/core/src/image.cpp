#include "radialkit/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radialkit/errors.hpp"

namespace radialkit {

namespace {

void check_dimensions(int width, int height, int channels) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    if (channels != 1 && channels != 3) {
        throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : ImageBuffer(width, height, channels,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            static_cast<std::size_t>(std::max(height, 0)) *
                                            static_cast<std::size_t>(std::max(channels, 0)))) {}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dimensions(width, height, channels);
    if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
        throw InvalidArgument("image data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(width) + "x" + std::to_string(height) + "x" +
                              std::to_string(channels));
    }
}

double luminance(const ImageBuffer& img, int x, int y) {
    if (img.channels() == 1) return img.at(x, y);
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

bool contains(const Rect& outer, const Rect& inner) {
    return inner.width >= 0 && inner.height >= 0 && inner.x >= outer.x && inner.y >= outer.y &&
           inner.x + inner.width <= outer.x + outer.width && inner.y + inner.height <= outer.y + outer.height;
}

Rect central_region(int width, int height, double fraction) {
    const int w = static_cast<int>(std::lround(width * fraction));
    const int h = static_cast<int>(std::lround(height * fraction));
    return {(width - w) / 2, (height - h) / 2, w, h};
}

double psnr(const ImageBuffer& a, const ImageBuffer& b, const Rect& region) {
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
        throw InvalidArgument("psnr: image dimensions differ");
    }
    if (region.width < 1 || region.height < 1 || !contains(a.frame(), region)) {
        throw InvalidArgument("psnr: region outside the image");
    }
    double sum_sq = 0.0;
    for (int y = region.y; y < region.y + region.height; ++y) {
        for (int x = region.x; x < region.x + region.width; ++x) {
            for (int c = 0; c < a.channels(); ++c) {
                const double d = static_cast<double>(a.at(x, y, c)) - b.at(x, y, c);
                sum_sq += d * d;
            }
        }
    }
    if (sum_sq == 0.0) return std::numeric_limits<double>::infinity();
    const double count = static_cast<double>(region.width) * region.height * a.channels();
    const double mse = sum_sq / count;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) { return psnr(a, b, a.frame()); }

}  // namespace radialkit
