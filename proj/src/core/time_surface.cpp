#include "spadev/time_surface.hpp"

#include <algorithm>
#include <string>

#include "spadev/error.hpp"

namespace spadev {

TimeSurface::TimeSurface(int grid_width, int grid_height, int polarity_count)
    : width_(grid_width), height_(grid_height), polarities_(polarity_count) {
  if (grid_width <= 0 || grid_height <= 0 || polarity_count <= 0) {
    throw ConfigError("time surface dimensions must be positive");
  }
  last_t_.assign(static_cast<std::size_t>(polarity_count) * grid_width * grid_height, kNever);
}

void TimeSurface::update(const Event& event) {
  if (event.x >= width_ || event.y >= height_ || event.polarity >= polarities_) {
    throw RangeError("event (" + std::to_string(event.x) + "," + std::to_string(event.y) +
                     ",p=" + std::to_string(event.polarity) + ") outside surface " +
                     std::to_string(width_) + "x" + std::to_string(height_) + "x" +
                     std::to_string(polarities_));
  }
  last_t_[index(event.polarity, event.x, event.y)] = event.t;
}

std::vector<std::uint8_t> TimeSurface::binary_readout(Micros t_now, Micros tau) const {
  std::vector<std::uint8_t> out(last_t_.size());
  for (std::size_t i = 0; i < last_t_.size(); ++i) {
    const Micros t = last_t_[i];
    out[i] = (t != kNever && (t_now - t) < tau) ? 1 : 0;
  }
  return out;
}

void TimeSurface::reset() { std::fill(last_t_.begin(), last_t_.end(), kNever); }

bool BinaryPatch::empty() const {
  return std::none_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
}

namespace {
void check_roi_args(int side, Micros tau) {
  if (side <= 0 || side % 2 == 0) {
    throw ConfigError("ROI side must be odd and positive, got " + std::to_string(side));
  }
  if (tau <= 0) throw ConfigError("surface window tau must be positive");
}
}  // namespace

BinaryPatch read_binary_roi(const TimeSurface& surface, int center_x, int center_y, int side,
                            Micros t_now, Micros tau) {
  check_roi_args(side, tau);
  BinaryPatch patch;
  patch.polarities = surface.polarities();
  patch.side = side;
  patch.bits.assign(static_cast<std::size_t>(patch.polarities) * side * side, 0);
  const int half = side / 2;
  std::size_t i = 0;
  for (int p = 0; p < patch.polarities; ++p) {
    for (int dy = 0; dy < side; ++dy) {
      const int y = center_y - half + dy;
      for (int dx = 0; dx < side; ++dx, ++i) {
        const int x = center_x - half + dx;
        if (x < 0 || y < 0 || x >= surface.width() || y >= surface.height()) continue;
        patch.bits[i] = surface.active(p, x, y, t_now, tau) ? 1 : 0;
      }
    }
  }
  return patch;
}

int read_binary_roi_packed(const TimeSurface& surface, int center_x, int center_y, int side,
                           Micros t_now, Micros tau, std::uint64_t* words) {
  check_roi_args(side, tau);
  const int half = side / 2;
  const std::size_t n_bits = static_cast<std::size_t>(surface.polarities()) * side * side;
  std::fill(words, words + (n_bits + 63) / 64, 0);
  int set = 0;
  std::size_t i = 0;
  for (int p = 0; p < surface.polarities(); ++p) {
    for (int dy = 0; dy < side; ++dy) {
      const int y = center_y - half + dy;
      for (int dx = 0; dx < side; ++dx, ++i) {
        const int x = center_x - half + dx;
        if (x < 0 || y < 0 || x >= surface.width() || y >= surface.height()) continue;
        if (surface.active(p, x, y, t_now, tau)) {
          words[i / 64] |= std::uint64_t{1} << (i % 64);
          ++set;
        }
      }
    }
  }
  return set;
}

}  // namespace spadev
