#include <algorithm>
#include <cstdlib>

#include "spadev/error.hpp"
#include "spadev/eventgen.hpp"

namespace spadev {

namespace {

constexpr std::uint8_t kNone = 0xFF;

void check_theta(const OnOffParams& p) {
  if (p.theta <= 0) throw ConfigError("theta must be positive");
}

void check_frames(const Recording& r) {
  if (r.frames.size() < 2) throw ConfigError("frame differencing needs at least two frames");
}

// Polarity per pixel for frame pair (k-1, k); kNone where no event.
void diff_polarities(const DepthFrame& prev, const DepthFrame& cur, const OnOffParams& p,
                     std::vector<std::uint8_t>& out) {
  out.assign(cur.depth_codes.size(), kNone);
  const std::uint8_t up = p.on_is_increase ? oobu::kOn : oobu::kOff;
  const std::uint8_t down = p.on_is_increase ? oobu::kOff : oobu::kOn;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int d = static_cast<int>(cur.depth_codes[i]) - static_cast<int>(prev.depth_codes[i]);
    if (d >= p.theta) out[i] = up;
    else if (d <= -p.theta) out[i] = down;
  }
}

EventStream empty_stream(const Recording& r, EventKind kind) {
  EventStream s;
  s.kind = kind;
  s.grid_width = r.width();
  s.grid_height = r.height();
  s.polarities = polarity_count(kind);
  return s;
}

}  // namespace

void OobuParams::validate() const {
  check_theta(onoff);
  if (phi2 < 0 || phi1 < phi2) throw ConfigError("OOBU thresholds need phi1 >= phi2 >= 0");
}

EventStream onoff_convert(const Recording& recording, const OnOffParams& params) {
  validate(recording);
  check_theta(params);
  check_frames(recording);
  EventStream out = empty_stream(recording, EventKind::kOnOff);
  std::vector<std::uint8_t> pol;
  const int w = recording.width();
  for (std::size_t k = 1; k < recording.frames.size(); ++k) {
    diff_polarities(recording.frames[k - 1], recording.frames[k], params, pol);
    const Micros t = recording.frame_time(k);
    for (std::size_t i = 0; i < pol.size(); ++i) {
      if (pol[i] == kNone) continue;
      out.events.push_back({static_cast<std::uint16_t>(i % w), static_cast<std::uint16_t>(i / w), t, pol[i]});
    }
  }
  return out;
}

std::optional<std::uint16_t> oobu_classify(int on_count, int off_count, int phi1, int phi2) {
  if (on_count > 0 && off_count > 0) {
    if (on_count > phi2 && off_count > phi2) return oobu::kBi;
    return std::nullopt;
  }
  if (on_count + off_count > phi1) return oobu::kUni;
  return std::nullopt;
}

EventStream oobu_convert(const Recording& recording, const OobuParams& params) {
  validate(recording);
  params.validate();
  check_frames(recording);
  EventStream out = empty_stream(recording, EventKind::kOobu);
  const int w = recording.width();
  const int h = recording.height();
  std::vector<std::uint8_t> pol;
  for (std::size_t k = 1; k < recording.frames.size(); ++k) {
    diff_polarities(recording.frames[k - 1], recording.frames[k], params.onoff, pol);
    const Micros t = recording.frame_time(k);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto p = pol[static_cast<std::size_t>(y) * w + x];
        if (p == kNone) continue;
        const auto ex = static_cast<std::uint16_t>(x);
        const auto ey = static_cast<std::uint16_t>(y);
        out.events.push_back({ex, ey, t, p});
        int on = 0;
        int off = 0;
        for (int ny = std::max(y - 1, 0); ny <= std::min(y + 1, h - 1); ++ny) {
          for (int nx = std::max(x - 1, 0); nx <= std::min(x + 1, w - 1); ++nx) {
            const auto q = pol[static_cast<std::size_t>(ny) * w + nx];
            if (q == oobu::kOn) ++on;
            else if (q == oobu::kOff) ++off;
          }
        }
        if (auto extra = oobu_classify(on, off, params.phi1, params.phi2)) {
          out.events.push_back({ex, ey, t, *extra});
        }
      }
    }
  }
  return out;
}

}  // namespace spadev
