#pragma once

#include <cstdint>

namespace affperc {

// 64-bit finalizer with full avalanche (the splitmix64 mixing step).
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Feed one word into a running hash state.
inline constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t w) noexcept {
    return mix64((h + kGolden) ^ w);
}

// Seed for the i-th independent stream of a master seed (the splitmix64 sequence).
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master + kGolden * (index + 1));
}

// Convert 64 random bits to a double in [0,1) using the top 53 bits.
inline constexpr double bits_to_unit(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace affperc
