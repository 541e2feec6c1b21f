#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "spadev/types.hpp"

namespace spadev {

/// Per-polarity grid of most recent event timestamps.
///
/// The binary readout of a cell is 1 iff the cell has fired and
/// (t_now - last_t) < tau. Reads never mutate the surface. Mutation is
/// single-writer.
class TimeSurface {
 public:
  static constexpr Micros kNever = std::numeric_limits<Micros>::min();

  TimeSurface() = default;
  TimeSurface(int grid_width, int grid_height, int polarity_count);

  int width() const { return width_; }
  int height() const { return height_; }
  int polarities() const { return polarities_; }

  /// Throws RangeError if the event lies outside the grid or polarity range.
  void update(const Event& event);

  Micros last_t(int polarity, int x, int y) const { return last_t_[index(polarity, x, y)]; }

  bool active(int polarity, int x, int y, Micros t_now, Micros tau) const {
    const Micros t = last_t_[index(polarity, x, y)];
    return t != kNever && (t_now - t) < tau;
  }

  /// Full-grid binary readout, layout [polarity][y][x].
  std::vector<std::uint8_t> binary_readout(Micros t_now, Micros tau) const;

  void reset();

 private:
  std::size_t index(int p, int x, int y) const {
    return (static_cast<std::size_t>(p) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int polarities_ = 0;
  std::vector<Micros> last_t_;
};

/// Binary P x D x D patch around a center, flattened [polarity][dy][dx].
struct BinaryPatch {
  int polarities = 0;
  int side = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(int p, int dx, int dy) const {
    return bits[(static_cast<std::size_t>(p) * side + dy) * side + dx];
  }
  bool empty() const;
};

/// Off-grid cells read as 0. Throws ConfigError for an even side or tau <= 0.
BinaryPatch read_binary_roi(const TimeSurface& surface, int center_x, int center_y, int side,
                            Micros t_now, Micros tau);

/// Packed variant used on hot paths: writes the same bit layout LSB-first into
/// `words`, which must hold at least ceil(P*D*D / 64) entries. Returns the
/// number of set bits.
int read_binary_roi_packed(const TimeSurface& surface, int center_x, int center_y, int side,
                           Micros t_now, Micros tau, std::uint64_t* words);

}  // namespace spadev
