#pragma once

#include <bit>
#include <cstdint>

namespace shrimplab::kernels::detail {

// Floor applied to |f'| before accumulation, so a superstable step stays finite.
inline constexpr double kDerivFloor = 1e-300;

inline constexpr std::uint64_t kExpMask = 0x7ff0000000000000ULL;
inline constexpr std::uint64_t kHalfExp = 1022ULL << 52;

// Splits a positive normal double into m in [0.5, 1) and e with v = m * 2^e.
// Same bit manipulation as the vector kernels.
inline double split_normal(double v, std::int64_t& e) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  e += static_cast<std::int64_t>((bits & kExpMask) >> 52) - 1022;
  return std::bit_cast<double>((bits & ~kExpMask) | kHalfExp);
}

}  // namespace shrimplab::kernels::detail
