#include <algorithm>
#include <cmath>

#include "spadev/classify.hpp"
#include "spadev/error.hpp"

namespace spadev {

int default_event_interval(EventKind kind) {
  switch (kind) {
    case EventKind::kFirstAnd: return 51;
    case EventKind::kOnOff: return 74;
    case EventKind::kOobu: return 201;
    case EventKind::kFeature: return 0;
  }
  return 0;
}

std::vector<Micros> sample_instants(const Recording& recording, int interval) {
  if (interval < 1) throw ConfigError("frame sampling interval must be at least 1");
  std::vector<Micros> out;
  const auto n = recording.frames.size() / static_cast<std::size_t>(interval);
  for (std::size_t j = 1; j <= n; ++j) out.push_back(static_cast<Micros>(j * interval) * recording.pulse_period);
  return out;
}

std::vector<Micros> sample_instants(const EventStream& stream, int k) {
  if (k < 1) throw ConfigError("event sampling interval must be at least 1");
  std::vector<Micros> out;
  for (std::size_t i = static_cast<std::size_t>(k); i <= stream.events.size(); i += static_cast<std::size_t>(k)) {
    out.push_back(stream.events[i - 1].t);
  }
  return out;
}

int normalized_event_interval(std::uint64_t total_events, std::uint64_t frame_samples) {
  if (frame_samples == 0) return 1;
  const double k = std::round(static_cast<double>(total_events) / static_cast<double>(frame_samples));
  return std::max(1, static_cast<int>(k));
}

std::vector<ChannelImage> extract_event_samples(const EventStream& stream, int k, const SampleOptions& options) {
  if (k < 1) throw ConfigError("event sampling interval must be at least 1");
  std::vector<ChannelImage> out;
  if (stream.events.size() < static_cast<std::size_t>(k)) return out;
  TimeSurface surface(stream.grid_width, stream.grid_height, stream.polarities);
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    surface.update(stream.events[i]);
    if ((i + 1) % static_cast<std::size_t>(k) != 0) continue;
    const ChannelImage img = surface_image(surface, stream.events[i].t, options.tau);
    out.push_back(crop(img, select_region(img, options.activity_fraction)));
  }
  return out;
}

std::vector<ChannelImage> extract_frame_samples(const Recording& recording, int interval, const SampleOptions& options) {
  if (interval < 1) throw ConfigError("frame sampling interval must be at least 1");
  std::vector<ChannelImage> out;
  const int w = recording.width();
  const int h = recording.height();
  for (std::size_t f = static_cast<std::size_t>(interval); f <= recording.frames.size(); f += static_cast<std::size_t>(interval)) {
    const DepthFrame& frame = recording.frames[f - 1];
    ChannelImage img(1, w, h);
    for (std::size_t i = 0; i < frame.depth_codes.size(); ++i) {
      const auto code = frame.depth_codes[i];
      img.values[i] = code == kNoReturn ? 0.0f : static_cast<float>(65536 - code) / 65536.0f;
    }
    out.push_back(crop(img, select_region(img, options.activity_fraction)));
  }
  return out;
}

}  // namespace spadev
