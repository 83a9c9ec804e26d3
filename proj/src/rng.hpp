#pragma once

#include <cstdint>

namespace lyapnet {

// SplitMix64: 64-bit counter-based generator (Steele/Lea/Flood mixing
// constants). Used for every random draw in the project so that results are
// bit-reproducible across platforms and standard-library versions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    // Uniform on [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, bound) via multiply-shift (deterministic,
    // bias below 2^-64).
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

// Independent substreams of one user-facing seed. Streams are spaced by the
// golden-ratio gamma so distinct tags never share a state sequence.
inline SplitMix64 seeded_stream(std::uint64_t seed, std::uint64_t stream_tag) {
    return SplitMix64(seed + stream_tag * 0x9E3779B97F4A7C15ULL);
}

// Stream tags used across the library.
inline constexpr std::uint64_t kStreamDataset = 0;
inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamShuffle = 2;

}  // namespace lyapnet
