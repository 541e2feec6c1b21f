#include "spadev/types.hpp"

#include <algorithm>
#include <string>

#include "spadev/error.hpp"

namespace spadev {

DepthFrame::DepthFrame(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ConfigError("frame dimensions must be positive");
  depth_codes.assign(static_cast<std::size_t>(w) * h, kNoReturn);
}

void validate(const Recording& recording, int n_classes) {
  if (recording.pulse_period <= 0) throw ConfigError("pulse_period must be positive");
  if (n_classes > 0 && (recording.class_id < 0 || recording.class_id >= n_classes)) {
    throw ConfigError("class_id " + std::to_string(recording.class_id) + " outside [0, " +
                      std::to_string(n_classes) + ")");
  }
  if (recording.frames.empty()) return;
  const int w = recording.frames.front().width;
  const int h = recording.frames.front().height;
  if (w <= 0 || h <= 0) throw ConfigError("frame dimensions must be positive");
  for (const auto& f : recording.frames) {
    if (f.width != w || f.height != h) throw ConfigError("frames disagree on dimensions");
    if (f.depth_codes.size() != static_cast<std::size_t>(w) * h) {
      throw ConfigError("frame payload does not match its dimensions");
    }
  }
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kFirstAnd: return "firstand";
    case EventKind::kOnOff: return "onoff";
    case EventKind::kOobu: return "oobu";
    case EventKind::kFeature: return "feature";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view name) {
  if (name == "firstand" || name == "first-and") return EventKind::kFirstAnd;
  if (name == "onoff" || name == "on-off") return EventKind::kOnOff;
  if (name == "oobu") return EventKind::kOobu;
  if (name == "feature") return EventKind::kFeature;
  throw ConfigError("unknown event kind '" + std::string(name) + "'");
}

int polarity_count(EventKind kind, int feature_count) {
  switch (kind) {
    case EventKind::kFirstAnd: return 4;
    case EventKind::kOnOff: return 2;
    case EventKind::kOobu: return 4;
    case EventKind::kFeature: return feature_count;
  }
  return 0;
}

bool is_well_formed(const EventStream& stream) {
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    if (e.x >= stream.grid_width || e.y >= stream.grid_height || e.polarity >= stream.polarities) {
      return false;
    }
    if (i > 0 && event_order(e, stream.events[i - 1])) return false;
  }
  return true;
}

std::vector<std::size_t> polarity_counts(const EventStream& stream) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(stream.polarities, 0)), 0);
  for (const auto& e : stream.events) {
    if (e.polarity < counts.size()) ++counts[e.polarity];
  }
  return counts;
}

}  // namespace spadev
