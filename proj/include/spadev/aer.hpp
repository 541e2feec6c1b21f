#pragma once

#include <cstdint>

namespace spadev {

/// 32-bit address-event word.
///
///   [31:25] row     (7 bits)
///   [24:18] column  (7 bits)
///   [17:16] feature (2 bits, N=0 S=1 E=2 W=3)
///   [15:0]  laser pulse index modulo 2^16
using AerWord = std::uint32_t;

struct AerFields {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint32_t feature_class = 0;
  std::uint32_t pulse_index = 0;

  bool operator==(const AerFields&) const = default;
};

inline constexpr std::uint32_t kAerMaxRow = 127;
inline constexpr std::uint32_t kAerMaxCol = 127;
inline constexpr std::uint32_t kAerMaxFeature = 3;
inline constexpr std::uint32_t kAerPulseModulus = 1u << 16;

/// Throws RangeError naming the first out-of-range field. The pulse index is
/// not wrapped here; callers reduce it modulo 2^16.
AerWord encode_aer(std::uint32_t row, std::uint32_t col, std::uint32_t feature_class,
                   std::uint32_t pulse_index);

constexpr AerFields decode_aer(AerWord word) {
  return AerFields{word >> 25, (word >> 18) & 0x7Fu, (word >> 16) & 0x3u, word & 0xFFFFu};
}

}  // namespace spadev
