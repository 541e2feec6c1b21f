#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spadev/types.hpp"

namespace spadev {

// First-AND -------------------------------------------------------------------

struct PixelOffset {
  int dx = 0;
  int dy = 0;
};

/// Four bar-shaped AND gates over an r x r receptive field, listed in
/// priority order N > S > E > W. Every gate has the same number of inputs.
struct GateBank {
  int rf_side = 4;
  std::array<std::vector<PixelOffset>, 4> gates;

  /// Border rows/columns of the field: N = top row, S = bottom row,
  /// E = right column, W = left column.
  static GateBank borders(int rf_side = 4);
  void validate() const;
};

struct RfState {
  std::uint16_t stored_feature = gate::kNorth;
  int counter = 0;  // 3-bit saturating, [0, 7]

  bool operator==(const RfState&) const = default;
};

inline constexpr int kCounterMax = 7;

struct FirstAndParams {
  int phi = 6;
  /// Events beyond this many within one pulse are dropped in arbiter order.
  std::optional<std::size_t> fifo_capacity_per_pulse;

  void validate() const;
};

/// Gate firing time is the max input code (an AND latches with its last
/// input); any sentinel input blocks the gate. The earliest gate wins, ties
/// go to priority order. Returns nothing when no gate is fully latched.
std::optional<std::uint16_t> firstand_pulse_winner(const DepthFrame& frame, int rf_x, int rf_y,
                                                   const GateBank& gates);

struct RfStepResult {
  RfState state;
  std::optional<std::uint16_t> emitted;
};

RfStepResult firstand_rf_step(RfState state, std::optional<std::uint16_t> winner,
                              const FirstAndParams& params);

/// Stats reported alongside a First-AND conversion.
struct FirstAndStats {
  std::size_t dropped_events = 0;
};

/// Stride-1 tiling of r x r fields: grid (W-r+1) x (H-r+1). Event t is
/// frame_index * pulse_period; within a pulse, fields step in row-major order.
EventStream firstand_convert(const Recording& recording, const GateBank& gates,
                             const FirstAndParams& params, FirstAndStats* stats = nullptr);

// Frame difference ------------------------------------------------------------

struct OnOffParams {
  int theta = 2;
  /// When true, On means the depth code increased by at least theta.
  bool on_is_increase = true;
};

struct OobuParams {
  OnOffParams onoff;
  int phi1 = 2;  // uni-polar: single polarity count must exceed this
  int phi2 = 1;  // bi-polar: both counts must exceed this

  void validate() const;
};

/// d = Z_k - Z_{k-1} with the sentinel read as code 0. Emits at t = k * period.
EventStream onoff_convert(const Recording& recording, const OnOffParams& params);

/// On/Off events plus at most one Bi or Uni event per On/Off event, judged on
/// the 3x3 neighborhood of same-pair events (inclusive, clipped at borders).
EventStream oobu_convert(const Recording& recording, const OobuParams& params);

/// Augmentation decision for one neighborhood; exposed for tests.
std::optional<std::uint16_t> oobu_classify(int on_count, int off_count, int phi1, int phi2);

// Polarity-count ratio demo ----------------------------------------------------

struct LabeledCounts {
  int class_id = 0;
  double numerator = 0;    // count of polarity A
  double denominator = 0;  // count of polarity B
};

struct RatioSplit {
  double accuracy = 0;
  double low_threshold = 0;
  double high_threshold = 0;
  std::array<int, 3> interval_class{};  // class assigned below / between / above
};

/// Best training accuracy of a two-threshold partition of the ratio line into
/// three class intervals (every class-to-interval assignment is tried). A
/// zero denominator maps to +infinity. Throws ConfigError unless exactly three
/// distinct classes are present.
RatioSplit best_two_threshold_split(std::span<const LabeledCounts> samples);

struct RatioDemoResult {
  RatioSplit onoff;   // On / Off
  RatioSplit biuni;   // Bi / Uni
};

/// Expects OOBU streams; the On/Off ratio uses polarities 0 and 1.
RatioDemoResult count_ratio_demo(std::span<const EventStream> oobu_streams, std::span<const int> class_ids);

// Data rate ------------------------------------------------------------------

struct DataRate {
  std::uint64_t frame_bytes = 0;
  std::uint64_t event_bytes = 0;
  double fold_reduction = 0;
};

/// Frames at 2 bytes per pixel against one 32-bit AER word per event.
DataRate datarate_stats(const Recording& recording, const EventStream& stream);

}  // namespace spadev
