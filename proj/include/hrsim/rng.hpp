#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hrsim::rng {

// Counter-based streams: every variate is a pure function of
// (seed, stream, counter), so values never depend on generation order,
// horizon length or thread count.
//
// Stream ids in use:
//   0        forward Wiener increments (t > 0)
//   1        backward Wiener increments (t < 0)
//   16 + i   initial-state sample i of an ensemble
//   1024 + i seed i of a Monte-Carlo study
inline constexpr std::uint64_t kForwardStream = 0;
inline constexpr std::uint64_t kBackwardStream = 1;
inline constexpr std::uint64_t kSampleStreamBase = 16;
inline constexpr std::uint64_t kStudyStreamBase = 1024;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) noexcept {
    std::uint64_t z = splitmix64(seed);
    z = splitmix64(z ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    return splitmix64(z ^ counter);
}

/// Uniform variate in the open interval (0, 1).
constexpr double uniform(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t counter) noexcept {
    return (static_cast<double>(hash(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal variate via Box-Muller on two counter slots.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    const double u1 = uniform(seed, stream, 2 * counter);
    const double u2 = uniform(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Seed of a derived sub-stream, used to hand independent seeds to tasks.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return hash(seed, stream, 0x5EEDULL);
}

} // namespace hrsim::rng
