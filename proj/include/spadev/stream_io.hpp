#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "spadev/types.hpp"

namespace spadev {

/// "SPDEVT01" event file: magic[8] u8 kind u8 pad u16 grid_w u16 grid_h
/// u32 event_count u32 reserved, then one little-endian AER word per event.
/// Polarity is carried in the 2-bit feature field, so only streams with at
/// most four polarities can be written. Timestamps are stored as the laser
/// pulse index modulo 2^16 and unwrapped on load, which assumes no gap of
/// 2^16 or more pulses between consecutive events.
inline constexpr std::string_view kStreamMagic = "SPDEVT01";
inline constexpr std::size_t kStreamHeaderBytes = 22;

std::string serialize_stream(const EventStream& stream, Micros pulse_period);
EventStream parse_stream(std::string_view bytes, Micros pulse_period);

void save_stream(const EventStream& stream, const std::filesystem::path& path, Micros pulse_period);
EventStream load_stream(const std::filesystem::path& path, Micros pulse_period);

}  // namespace spadev
