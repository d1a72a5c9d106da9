#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace drkit {

// SplitMix64 stream. Output is a pure function of (seed, sequence position),
// so any (seed, trial-index) pair names a reproducible substream; this is
// what makes the simulation independent of worker count and platform
// (std::mt19937_64 is portable, but the std distributions are not).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    // Substream for an indexed unit of work (e.g. one simulation trial).
    SplitMix64(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(mix(seed ^ 0x9e3779b97f4a7c15ULL, index)) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() noexcept {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n). Multiply-shift mapping; the 2^-64-level bias
    // is irrelevant for the small n used here.
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Standard normal via Box-Muller, one variate per call.
    double normal() noexcept {
        const double r = std::sqrt(-2.0 * std::log(uniform01_open_low()));
        const double theta = 2.0 * std::numbers::pi * uniform01();
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace drkit
