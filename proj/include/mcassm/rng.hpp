// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace mcassm {

// SplitMix64. Used instead of <random> engines/distributions so that
// bit streams are identical across compilers and platforms (the Monte-Carlo
// determinism contract depends on this).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // standard normal pair via Box-Muller
  std::pair<double, double> normal_pair() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based stream key: the generator state for one (seed, a, b) triple
// is a pure function of the triple, so work can be sharded across any number
// of workers without changing a single draw.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ull);
  k = mix64(k ^ (a + 0xbf58476d1ce4e5b9ull));
  k = mix64(k ^ (b + 0x94d049bb133111ebull));
  return k;
}

}  // namespace mcassm
