#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace entscope {

// Named sub-streams for seed derivation. Every random decision in the
// toolkit draws from a seed produced by mix_seed(parent, stream [, index]),
// so a single master seed reproduces the whole pipeline.
namespace seed_stream {
inline constexpr std::uint64_t kBlock = 1;    // per-block state construction
inline constexpr std::uint64_t kShots = 2;    // finite-shot sampling
inline constexpr std::uint64_t kClasses = 3;  // composition sampling
inline constexpr std::uint64_t kPool = 4;     // measurement pool draws
inline constexpr std::uint64_t kSplit = 5;    // train/val/test split
inline constexpr std::uint64_t kSample = 6;   // per-record state seed
inline constexpr std::uint64_t kShuffle = 7;  // epoch shuffling
inline constexpr std::uint64_t kDropout = 8;  // dropout masks
inline constexpr std::uint64_t kTriplet = 9;  // triplet mining
inline constexpr std::uint64_t kInit = 10;    // weight initialization
}  // namespace seed_stream

// SplitMix64 finalizer over (seed, stream). Statistically independent
// streams for distinct stream values; stable across platforms.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index) {
    return mix_seed(mix_seed(seed, stream), index);
}

// Deterministic RNG wrapper. std::mt19937_64 output is fully specified by
// the standard; the distribution helpers below avoid std::uniform_*, whose
// results vary between standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform in [0, n) via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace entscope
