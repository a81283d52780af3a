#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "radialkit/image.hpp"
#include "radialkit/random.hpp"

namespace testing_support {

/// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Uniform random bytes, reproducible from the seed.
radialkit::ImageBuffer noise_image(int width, int height, int channels, std::uint64_t seed);

std::string file_hash(const std::filesystem::path& path);
/// Hash over every regular file's relative path and content, in sorted order.
std::string tree_hash(const std::filesystem::path& root);

}  // namespace testing_support
