#include "spadev/recording_io.hpp"

#include <limits>

#include "../core/byteio.hpp"
#include "spadev/error.hpp"

namespace spadev {

namespace {
constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 40;
}

std::string serialize_recording(const Recording& recording) {
  validate(recording);
  const int w = recording.width();
  const int h = recording.height();
  if (w > std::numeric_limits<std::uint16_t>::max() || h > std::numeric_limits<std::uint16_t>::max()) {
    throw ParseError(ErrorCode::kDimensionOverflow, "frame dimensions exceed 16 bits");
  }
  if (recording.class_id < 0 || recording.class_id > std::numeric_limits<std::uint16_t>::max()) {
    throw RangeError("class_id does not fit in 16 bits");
  }
  if (recording.pulse_period > std::numeric_limits<std::uint32_t>::max()) {
    throw RangeError("pulse_period does not fit in 32 bits");
  }
  detail::ByteWriter out;
  out.reserve(22 + recording.frames.size() * static_cast<std::size_t>(w) * h * 2);
  out.bytes(kRecordingMagic);
  out.u16(static_cast<std::uint16_t>(w));
  out.u16(static_cast<std::uint16_t>(h));
  out.u32(static_cast<std::uint32_t>(recording.frames.size()));
  out.u32(static_cast<std::uint32_t>(recording.pulse_period));
  out.u16(static_cast<std::uint16_t>(recording.class_id));
  for (const auto& frame : recording.frames) {
    for (std::uint16_t code : frame.depth_codes) out.u16(code);
  }
  return out.data();
}

Recording parse_recording(std::string_view bytes, std::string recording_id) {
  detail::ByteReader in(bytes);
  if (!in.has(kRecordingMagic.size()) || in.bytes(kRecordingMagic.size()) != kRecordingMagic) {
    throw ParseError(ErrorCode::kBadMagic, "not an SPDREC01 recording (bad magic)");
  }
  const int w = in.u16();
  const int h = in.u16();
  const std::uint32_t frame_count = in.u32();
  const std::uint32_t period = in.u32();
  const int class_id = in.u16();

  const std::uint64_t payload = std::uint64_t{frame_count} * w * h * 2;
  if ((frame_count > 0 && (w == 0 || h == 0)) || payload > kMaxPayloadBytes) {
    throw ParseError(ErrorCode::kDimensionOverflow, "recording header declares an invalid size");
  }
  if (in.remaining() < payload) {
    throw ParseError(ErrorCode::kTruncated, "recording payload truncated: header promises " +
                                                std::to_string(frame_count) + " frames");
  }
  if (in.remaining() > payload) {
    throw ParseError(ErrorCode::kDimensionOverflow, "recording has trailing bytes beyond its frames");
  }
  if (period == 0) throw ConfigError("recording pulse_period is zero");

  Recording rec;
  rec.pulse_period = period;
  rec.class_id = class_id;
  rec.recording_id = std::move(recording_id);
  rec.frames.reserve(frame_count);
  for (std::uint32_t f = 0; f < frame_count; ++f) {
    DepthFrame frame(w, h);
    for (auto& code : frame.depth_codes) code = in.u16();
    rec.frames.push_back(std::move(frame));
  }
  return rec;
}

void save_recording(const Recording& recording, const std::filesystem::path& path) {
  detail::write_file(path, serialize_recording(recording));
}

Recording load_recording(const std::filesystem::path& path) {
  return parse_recording(detail::read_file(path), path.stem().string());
}

}  // namespace spadev
