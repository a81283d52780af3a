#include "radialkit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

#include "radialkit/errors.hpp"

namespace radialkit {

namespace {

using Kind = IoError::Kind;

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

bool has_png_signature(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(Kind::io_failure, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(Kind::io_failure, "read failed: " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(Kind::io_failure, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(Kind::io_failure, "write failed: " + path.string());
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
    if (!has_png_signature(bytes)) throw IoError(Kind::corrupt_file, "not a PNG stream");

    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        const std::string message = image.message;
        png_image_free(&image);
        throw IoError(Kind::corrupt_file, "PNG header: " + message);
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw IoError(Kind::unsupported_format, "16-bit PNG is not supported");
    }
    if (image.format & PNG_FORMAT_FLAG_ALPHA) {
        png_image_free(&image);
        throw IoError(Kind::unsupported_format, "PNG with alpha channel is not supported");
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

    const int width = static_cast<int>(image.width);
    const int height = static_cast<int>(image.height);
    const int channels = color ? 3 : 1;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
        const std::string message = image.message;
        png_image_free(&image);
        throw IoError(Kind::corrupt_file, "PNG data: " + message);
    }
    return ImageBuffer(width, height, channels, std::move(data));
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
        throw IoError(Kind::io_failure, std::string("PNG encode: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0, nullptr)) {
        throw IoError(Kind::io_failure, std::string("PNG encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

namespace {

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    long next_number() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw IoError(Kind::corrupt_file, "PNM header: expected a number");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_++] - '0');
            if (value > 1'000'000'000) throw IoError(Kind::corrupt_file, "PNM header: number too large");
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw IoError(Kind::corrupt_file, "PNM header: missing raster separator");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

ImageBuffer decode_pnm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7') {
            throw IoError(Kind::unsupported_format, "only binary P5/P6 PNM files are supported");
        }
        throw IoError(Kind::corrupt_file, "not a PNM stream");
    }
    const int channels = bytes[1] == '6' ? 3 : 1;
    PnmHeaderReader header(bytes);
    const long width = header.next_number();
    const long height = header.next_number();
    const long maxval = header.next_number();
    if (width < 1 || height < 1) throw IoError(Kind::corrupt_file, "PNM header: zero dimension");
    if (maxval != 255) throw IoError(Kind::unsupported_format, "only 8-bit PNM (maxval 255) is supported");
    const std::size_t offset = header.raster_offset();
    const std::size_t needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
    if (bytes.size() - offset < needed) throw IoError(Kind::corrupt_file, "PNM raster truncated");
    std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + needed));
    return ImageBuffer(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const ImageBuffer& img) {
    const std::string header = std::string(img.channels() == 3 ? "P6" : "P5") + "\n" +
                               std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

bool is_image_path(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

ImageBuffer read_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        if (has_png_signature(bytes)) return decode_png(bytes);
        if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pnm(bytes);
    } catch (const IoError& e) {
        throw IoError(e.kind(), path.string() + ": " + e.what());
    }
    const std::string ext = lower_extension(path);
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
        throw IoError(Kind::corrupt_file, path.string() + ": unrecognized image data");
    }
    throw IoError(Kind::unsupported_format, path.string() + ": unsupported image format");
}

void write_image(const ImageBuffer& img, const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        write_file_bytes(path, encode_png(img));
    } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
        write_file_bytes(path, encode_pnm(img));
    } else {
        throw IoError(Kind::unsupported_format, path.string() + ": unsupported output format '" + ext + "'");
    }
}

}  // namespace radialkit
