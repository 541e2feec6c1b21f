#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spadev {

using Micros = std::int64_t;

/// Depth code reserved for "no photon latched during this pulse".
inline constexpr std::uint16_t kNoReturn = 0;

inline constexpr Micros kDefaultPulsePeriod = 10;  // 100 kHz laser

/// One laser pulse worth of photon time-of-flight codes, row-major.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> depth_codes;

  DepthFrame() = default;
  DepthFrame(int w, int h);

  std::uint16_t at(int x, int y) const { return depth_codes[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return depth_codes[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const DepthFrame&) const = default;
};

struct Recording {
  std::vector<DepthFrame> frames;
  Micros pulse_period = kDefaultPulsePeriod;
  int class_id = 0;
  std::string recording_id;

  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  Micros frame_time(std::size_t index) const { return static_cast<Micros>(index) * pulse_period; }

  bool operator==(const Recording&) const = default;
};

/// Throws ConfigError when frames disagree on size, the period is not
/// positive, or a class id is outside [0, n_classes) (n_classes <= 0 skips
/// the label check).
void validate(const Recording& recording, int n_classes = 0);

struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Micros t = 0;
  std::uint16_t polarity = 0;

  bool operator==(const Event&) const = default;
};

enum class EventKind : std::uint8_t {
  kFirstAnd = 0,
  kOnOff = 1,
  kOobu = 2,
  kFeature = 3,
};

// Polarity codes per stream kind.
namespace gate {
inline constexpr std::uint16_t kNorth = 0;
inline constexpr std::uint16_t kSouth = 1;
inline constexpr std::uint16_t kEast = 2;
inline constexpr std::uint16_t kWest = 3;
}  // namespace gate

namespace oobu {
inline constexpr std::uint16_t kOn = 0;
inline constexpr std::uint16_t kOff = 1;
inline constexpr std::uint16_t kBi = 2;
inline constexpr std::uint16_t kUni = 3;
}  // namespace oobu

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view name);

/// Fixed polarity count of a kind; Feature streams carry their own count.
int polarity_count(EventKind kind, int feature_count = 0);

struct EventStream {
  EventKind kind = EventKind::kOnOff;
  int grid_width = 0;
  int grid_height = 0;
  int polarities = 0;
  std::vector<Event> events;

  bool operator==(const EventStream&) const = default;
};

/// Strict weak order used by every producer: time, then row-major, then polarity.
inline bool event_order(const Event& a, const Event& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.polarity < b.polarity;
}

/// Single pass check of ordering plus grid and polarity bounds.
bool is_well_formed(const EventStream& stream);

/// Events per polarity.
std::vector<std::size_t> polarity_counts(const EventStream& stream);

}  // namespace spadev
