#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "radialkit/image.hpp"

namespace radialkit {

// Lossless 8-bit codecs: PNG (gray/RGB) and binary PGM (P5) / PPM (P6).
// Errors are reported as IoError with kind unsupported_format, corrupt_file
// or io_failure.

ImageBuffer read_image(const std::filesystem::path& path);
/// Format follows the extension: .png, or .pgm/.ppm/.pnm (P5 for gray, P6 for RGB).
void write_image(const ImageBuffer& img, const std::filesystem::path& path);

ImageBuffer decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
ImageBuffer decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pnm(const ImageBuffer& img);

bool is_image_path(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace radialkit
