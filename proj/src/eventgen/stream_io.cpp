#include "spadev/stream_io.hpp"

#include <algorithm>

#include "../core/byteio.hpp"
#include "spadev/aer.hpp"
#include "spadev/error.hpp"

namespace spadev {

std::string serialize_stream(const EventStream& stream, Micros pulse_period) {
  if (pulse_period <= 0) throw ConfigError("pulse_period must be positive");
  if (stream.grid_width > static_cast<int>(kAerMaxCol) + 1 ||
      stream.grid_height > static_cast<int>(kAerMaxRow) + 1) {
    throw RangeError("grid exceeds the 128x128 AER address space");
  }
  detail::ByteWriter out;
  out.reserve(kStreamHeaderBytes + 4 * stream.events.size());
  out.bytes(kStreamMagic);
  out.u8(static_cast<std::uint8_t>(stream.kind));
  out.u8(0);
  out.u16(static_cast<std::uint16_t>(stream.grid_width));
  out.u16(static_cast<std::uint16_t>(stream.grid_height));
  out.u32(static_cast<std::uint32_t>(stream.events.size()));
  out.u32(0);
  for (const auto& e : stream.events) {
    if (e.t < 0) throw RangeError("negative event timestamp");
    const auto pulse = static_cast<std::uint64_t>(e.t / pulse_period) % kAerPulseModulus;
    out.u32(encode_aer(e.y, e.x, e.polarity, static_cast<std::uint32_t>(pulse)));
  }
  return out.data();
}

EventStream parse_stream(std::string_view bytes, Micros pulse_period) {
  if (pulse_period <= 0) throw ConfigError("pulse_period must be positive");
  detail::ByteReader in(bytes);
  if (!in.has(kStreamMagic.size()) || in.bytes(kStreamMagic.size()) != kStreamMagic) {
    throw ParseError(ErrorCode::kBadMagic, "not an SPDEVT01 event stream (bad magic)");
  }
  EventStream s;
  const auto kind = in.u8();
  if (kind > static_cast<std::uint8_t>(EventKind::kFeature)) {
    throw ParseError(ErrorCode::kDimensionOverflow, "unknown stream kind " + std::to_string(kind));
  }
  s.kind = static_cast<EventKind>(kind);
  in.u8();
  s.grid_width = in.u16();
  s.grid_height = in.u16();
  const std::uint32_t count = in.u32();
  in.u32();
  if (in.remaining() < std::uint64_t{count} * 4) {
    throw ParseError(ErrorCode::kTruncated, "event payload truncated");
  }
  if (in.remaining() > std::uint64_t{count} * 4) {
    throw ParseError(ErrorCode::kDimensionOverflow, "event file has trailing bytes");
  }
  s.events.reserve(count);
  std::int64_t wraps = 0;
  std::uint32_t last_pulse = 0;
  int max_pol = -1;
  for (std::uint32_t i = 0; i < count; ++i) {
    const AerFields f = decode_aer(in.u32());
    if (i > 0 && f.pulse_index < last_pulse) ++wraps;
    last_pulse = f.pulse_index;
    Event e;
    e.x = static_cast<std::uint16_t>(f.col);
    e.y = static_cast<std::uint16_t>(f.row);
    e.polarity = static_cast<std::uint16_t>(f.feature_class);
    e.t = (wraps * kAerPulseModulus + f.pulse_index) * pulse_period;
    if (e.x >= s.grid_width || e.y >= s.grid_height) {
      throw RangeError("event address outside the declared grid");
    }
    max_pol = std::max<int>(max_pol, e.polarity);
    s.events.push_back(e);
  }
  s.polarities = s.kind == EventKind::kFeature ? max_pol + 1 : polarity_count(s.kind);
  return s;
}

void save_stream(const EventStream& stream, const std::filesystem::path& path, Micros pulse_period) {
  detail::write_file(path, serialize_stream(stream, pulse_period));
}

EventStream load_stream(const std::filesystem::path& path, Micros pulse_period) {
  return parse_stream(detail::read_file(path), pulse_period);
}

}  // namespace spadev
