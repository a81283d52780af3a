#include "radialkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "radialkit/errors.hpp"
#include "radialkit/image_io.hpp"
#include "radialkit/random.hpp"

namespace radialkit {

namespace {

struct FaceLayout {
    double background = 90.0;
    double stripe_amp = 30.0;
    double stripe_fx = 9.0;
    double stripe_fy = 4.0;
    double stripe_phase = 0.0;
    double ripple_amp = 12.0;
    double ripple_freq = 20.0;
    double head_cx = 0.0;
    double head_cy = 0.05;
    double head_rx = 0.5;
    double head_ry = 0.68;
    double skin = 180.0;
    double hair = 50.0;
    double hair_line = -0.3;
    double eye_dx = 0.2;
    double eye_y = -0.12;
    double eye_r = 0.07;
    double mouth_y = 0.35;
    double mouth_w = 0.2;
    double tint[3] = {1.0, 1.0, 1.0};
};

FaceLayout make_layout(std::uint64_t subject_seed) {
    CounterRng rng(subject_seed, 0x5eed);
    FaceLayout f;
    f.background = rng.uniform(50.0, 120.0);
    f.stripe_amp = rng.uniform(15.0, 40.0);
    f.stripe_fx = rng.uniform(6.0, 14.0);
    f.stripe_fy = rng.uniform(-6.0, 6.0);
    f.stripe_phase = rng.uniform(0.0, 6.283185307179586);
    f.ripple_amp = rng.uniform(6.0, 16.0);
    f.ripple_freq = rng.uniform(14.0, 28.0);
    f.head_cx = rng.uniform(-0.05, 0.05);
    f.head_cy = rng.uniform(0.0, 0.1);
    f.head_rx = rng.uniform(0.42, 0.58);
    f.head_ry = rng.uniform(0.6, 0.75);
    f.skin = rng.uniform(140.0, 215.0);
    f.hair = rng.uniform(20.0, 90.0);
    f.hair_line = rng.uniform(-0.42, -0.25);
    f.eye_dx = rng.uniform(0.16, 0.25);
    f.eye_y = rng.uniform(-0.18, -0.06);
    f.eye_r = rng.uniform(0.05, 0.085);
    f.mouth_y = rng.uniform(0.28, 0.42);
    f.mouth_w = rng.uniform(0.12, 0.24);
    f.tint[0] = rng.uniform(0.95, 1.1);
    f.tint[1] = rng.uniform(0.85, 1.0);
    f.tint[2] = rng.uniform(0.7, 0.95);
    return f;
}

double ellipse_value(double u, double v, double cx, double cy, double rx, double ry) {
    const double a = (u - cx) / rx;
    const double b = (v - cy) / ry;
    return a * a + b * b;
}

// Gray level of the scene at normalized position (u, v) in [-1, 1]^2.
double shade(const FaceLayout& f, double u, double v) {
    double value = f.background + f.stripe_amp * std::sin(f.stripe_fx * u + f.stripe_fy * v + f.stripe_phase) +
                   f.ripple_amp * std::sin(f.ripple_freq * std::hypot(u + 0.7, v - 0.9));

    const double head = ellipse_value(u, v, f.head_cx, f.head_cy, f.head_rx, f.head_ry);
    if (head <= 1.0) {
        value = v < f.hair_line ? f.hair : f.skin * (1.0 - 0.15 * head);
        const double local_v = v - f.head_cy;
        for (const double side : {-1.0, 1.0}) {
            const double ex = f.head_cx + side * f.eye_dx;
            const double eye = ellipse_value(u, local_v, ex, f.eye_y, f.eye_r * 1.4, f.eye_r);
            if (eye <= 1.0) value = eye <= 0.25 ? 20.0 : 235.0;
            const double brow_y = f.eye_y - 2.0 * f.eye_r;
            if (std::abs(local_v - brow_y) < 0.018 && std::abs(u - ex) < f.eye_r * 1.8) value = f.hair;
        }
        if (std::abs(u - f.head_cx) < 0.02 && local_v > f.eye_y && local_v < f.mouth_y - 0.12) {
            value *= 0.8;
        }
        if (ellipse_value(u, local_v, f.head_cx, f.mouth_y, f.mouth_w, 0.035) <= 1.0) value = 70.0;
    }
    return value;
}

}  // namespace

ImageBuffer synthetic_face(std::uint64_t subject_seed, std::uint64_t capture_seed,
                           const SyntheticFaceOptions& options) {
    if (options.size < 8) throw InvalidArgument("synthetic_face: size must be at least 8");
    const FaceLayout layout = make_layout(subject_seed);
    CounterRng capture(derive_seed(subject_seed, capture_seed), 0xca97);
    const double shift_x = capture.uniform(-options.jitter_px, options.jitter_px);
    const double shift_y = capture.uniform(-options.jitter_px, options.jitter_px);
    const double gain = capture.uniform(0.92, 1.08);
    const double offset = capture.uniform(-6.0, 6.0);

    const int size = options.size;
    const double half = size / 2.0;
    ImageBuffer img(size, size, options.channels);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = (x + 0.5 - shift_x - half) / half;
            const double v = (y + 0.5 - shift_y - half) / half;
            const double base = gain * shade(layout, u, v) + offset;
            for (int c = 0; c < options.channels; ++c) {
                const double tint = options.channels == 3 ? layout.tint[c] : 1.0;
                const double noisy = base * tint + options.noise_sigma * capture.normal();
                img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(noisy + 0.5), 0.0, 255.0));
            }
        }
    }
    return img;
}

ImageBuffer gradient_image(int width, int height, int channels) {
    ImageBuffer img(width, height, channels);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                const double t = (x + 2.0 * y + 17.0 * c) / (width + 2.0 * height + 34.0);
                img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(255.0 * t));
            }
        }
    }
    return img;
}

std::vector<std::filesystem::path> write_toy_corpus(const std::filesystem::path& dir, int count,
                                                    std::uint64_t seed, const SyntheticFaceOptions& options) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    paths.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "subject_%04d.png", i);
        const auto path = dir / name;
        write_image(synthetic_face(derive_seed(seed, static_cast<std::uint64_t>(i)), 0, options), path);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace radialkit
