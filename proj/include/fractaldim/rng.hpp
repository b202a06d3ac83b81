#pragma once

#include <cstdint>

namespace fractaldim::rng {

// Counter-based generator: draw n of stream (seed, stream) is a pure
// function of its arguments, so parallel chains can share a seed without
// sharing state and replays are exact across platforms and thread counts.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stream key; cache this when drawing many values from one stream.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t n) {
  return splitmix64(stream_key(seed, stream) + n * kGolden);
}

inline std::uint64_t at_key(std::uint64_t key, std::uint64_t n) {
  return splitmix64(key + n * kGolden);
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t n) {
  return static_cast<double>(at(seed, stream, n) >> 11) * 0x1.0p-53;
}

inline double uniform01_key(std::uint64_t key, std::uint64_t n) {
  return static_cast<double>(at_key(key, n) >> 11) * 0x1.0p-53;
}

}  // namespace fractaldim::rng
