#pragma once

// Counter-based random streams. A stream is keyed by (seed, index), so draws
// for item i never depend on how many items were processed before it or on
// which thread processed them. Integer and unit draws are bit-exact across
// platforms; normal() goes through libm.

#include <cstdint>

namespace radialkit {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
    constexpr CounterRng(std::uint64_t seed, std::uint64_t index) noexcept : key_(derive_seed(seed, index)) {}

    constexpr std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    constexpr double next_unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

    /// Standard normal via Box-Muller (one value per call).
    double normal() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace radialkit
