#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <unistd.h>
#include <vector>

#include "radialkit/image_io.hpp"

namespace fs = std::filesystem;

namespace testing_support {

namespace {

// FNV-1a, enough to compare trees within a test run.
std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

TempDir::TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("radialkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

radialkit::ImageBuffer noise_image(int width, int height, int channels, std::uint64_t seed) {
    radialkit::ImageBuffer img(width, height, channels);
    radialkit::CounterRng rng(seed, 0);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.next_u64() >> 56);
    return img;
}

std::string file_hash(const fs::path& path) {
    const auto bytes = radialkit::read_file_bytes(path);
    return hex(fnv1a(0xcbf29ce484222325ULL, bytes.data(), bytes.size()));
}

std::string tree_hash(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    }
    std::sort(files.begin(), files.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& rel : files) {
        const std::string name = rel.generic_string();
        h = fnv1a(h, name.data(), name.size());
        const auto bytes = radialkit::read_file_bytes(root / rel);
        h = fnv1a(h, bytes.data(), bytes.size());
    }
    return hex(h) + ":" + std::to_string(files.size());
}

}  // namespace testing_support
