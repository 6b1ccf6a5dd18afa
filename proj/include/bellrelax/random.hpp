#pragma once

#include <cstdint>
#include <random>

namespace bellrelax {

/// Uniform on [0, 1) from the top 53 bits of a 64-bit draw. Unlike
/// std::uniform_real_distribution this is bit-identical across standard
/// library implementations.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bellrelax
