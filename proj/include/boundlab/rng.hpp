#pragma once

#include <cstdint>

namespace boundlab {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so trials can run in any order and two
/// optimizers can consume the same stream.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(mix(seed ^ 0x243f6a8885a308d3ULL) ^ (stream * 0x9e3779b97f4a7c15ULL))) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
};

/// Seed for a sub-experiment that must not share streams with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
    return CounterRng::mix(seed ^ CounterRng::mix(tag + 0x6a09e667f3bcc909ULL));
}

}  // namespace boundlab
