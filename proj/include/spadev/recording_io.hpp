#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "spadev/types.hpp"

namespace spadev {

/// "SPDREC01" container:
///   magic[8] u16 width u16 height u32 frame_count u32 pulse_period_us u16 class_id
///   then frame_count * width * height little-endian u16 depth codes.
/// The recording id is not stored; loading takes it from the file stem.
inline constexpr std::string_view kRecordingMagic = "SPDREC01";

std::string serialize_recording(const Recording& recording);
Recording parse_recording(std::string_view bytes, std::string recording_id = {});

void save_recording(const Recording& recording, const std::filesystem::path& path);
Recording load_recording(const std::filesystem::path& path);

}  // namespace spadev
