#pragma once

#include <cstdint>
#include <random>

namespace hpl {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; decorrelates consecutive seeds before they reach the
// Mersenne twister.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream for task `index` of a run seeded with `seed`. `domain`
// separates unrelated consumers (frame synthesis vs bootstrap) sharing a seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(mix64(seed)), static_cast<std::uint32_t>(mix64(seed) >> 32),
                      static_cast<std::uint32_t>(mix64(domain)), static_cast<std::uint32_t>(mix64(index)),
                      static_cast<std::uint32_t>(mix64(index) >> 32)};
    return Rng(seq);
}

namespace stream_domain {
inline constexpr std::uint64_t frames = 0x4652414d;     // "FRAM"
inline constexpr std::uint64_t bootstrap = 0x424f4f54;  // "BOOT"
inline constexpr std::uint64_t sampling = 0x53414d50;   // "SAMP"
}  // namespace stream_domain

}  // namespace hpl
