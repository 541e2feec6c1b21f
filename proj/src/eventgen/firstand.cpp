#include <algorithm>
#include <limits>
#include <string>

#include "spadev/error.hpp"
#include "spadev/eventgen.hpp"

namespace spadev {

GateBank GateBank::borders(int rf_side) {
  if (rf_side < 2) throw ConfigError("receptive field side must be at least 2");
  GateBank bank;
  bank.rf_side = rf_side;
  for (int i = 0; i < rf_side; ++i) {
    bank.gates[gate::kNorth].push_back({i, 0});
    bank.gates[gate::kSouth].push_back({i, rf_side - 1});
    bank.gates[gate::kEast].push_back({rf_side - 1, i});
    bank.gates[gate::kWest].push_back({0, i});
  }
  return bank;
}

void GateBank::validate() const {
  const std::size_t inputs = gates.front().size();
  for (const auto& g : gates) {
    if (g.empty() || g.size() != inputs) {
      throw ConfigError("every AND gate must have the same nonzero number of inputs");
    }
    for (const auto& o : g) {
      if (o.dx < 0 || o.dy < 0 || o.dx >= rf_side || o.dy >= rf_side) {
        throw ConfigError("gate input lies outside the receptive field");
      }
    }
  }
}

void FirstAndParams::validate() const {
  if (phi < 1 || phi > kCounterMax) {
    throw ConfigError("phi must lie in [1, " + std::to_string(kCounterMax) + "], got " + std::to_string(phi));
  }
}

std::optional<std::uint16_t> firstand_pulse_winner(const DepthFrame& frame, int rf_x, int rf_y,
                                                   const GateBank& gates) {
  std::optional<std::uint16_t> winner;
  int best = std::numeric_limits<int>::max();
  for (std::uint16_t g = 0; g < gates.gates.size(); ++g) {
    int fire = 0;
    bool latched = true;
    for (const auto& o : gates.gates[g]) {
      const auto code = frame.at(rf_x + o.dx, rf_y + o.dy);
      if (code == kNoReturn) {
        latched = false;
        break;
      }
      fire = std::max<int>(fire, code);
    }
    // Strict comparison keeps the earlier (higher priority) gate on ties.
    if (latched && fire < best) {
      best = fire;
      winner = g;
    }
  }
  return winner;
}

RfStepResult firstand_rf_step(RfState state, std::optional<std::uint16_t> winner,
                              const FirstAndParams& params) {
  RfStepResult r{state, std::nullopt};
  if (!winner) return r;
  if (*winner == state.stored_feature) {
    r.state.counter = std::min(state.counter + 1, kCounterMax);
    if (r.state.counter >= params.phi) {
      r.emitted = state.stored_feature;
      r.state.counter = 0;
    }
  } else {
    r.state.counter = std::max(state.counter - 1, 0);
    if (r.state.counter == 0) {
      r.state.stored_feature = *winner;
      r.state.counter = 1;
    }
  }
  return r;
}

EventStream firstand_convert(const Recording& recording, const GateBank& gates,
                             const FirstAndParams& params, FirstAndStats* stats) {
  validate(recording);
  gates.validate();
  params.validate();
  const int w = recording.width();
  const int h = recording.height();
  EventStream out;
  out.kind = EventKind::kFirstAnd;
  out.polarities = polarity_count(EventKind::kFirstAnd);
  if (!recording.frames.empty() && (w < gates.rf_side || h < gates.rf_side)) {
    throw ConfigError("frames are smaller than one receptive field");
  }
  out.grid_width = recording.frames.empty() ? 0 : w - gates.rf_side + 1;
  out.grid_height = recording.frames.empty() ? 0 : h - gates.rf_side + 1;

  std::vector<RfState> states(static_cast<std::size_t>(out.grid_width) * out.grid_height);
  std::size_t dropped = 0;
  for (std::size_t k = 0; k < recording.frames.size(); ++k) {
    const DepthFrame& frame = recording.frames[k];
    const Micros t = recording.frame_time(k);
    std::size_t emitted_this_pulse = 0;
    for (int ry = 0; ry < out.grid_height; ++ry) {
      for (int rx = 0; rx < out.grid_width; ++rx) {
        auto& st = states[static_cast<std::size_t>(ry) * out.grid_width + rx];
        const auto step = firstand_rf_step(st, firstand_pulse_winner(frame, rx, ry, gates), params);
        st = step.state;
        if (!step.emitted) continue;
        if (params.fifo_capacity_per_pulse && emitted_this_pulse >= *params.fifo_capacity_per_pulse) {
          ++dropped;
          continue;
        }
        ++emitted_this_pulse;
        out.events.push_back({static_cast<std::uint16_t>(rx), static_cast<std::uint16_t>(ry), t, *step.emitted});
      }
    }
  }
  if (stats) stats->dropped_events = dropped;
  return out;
}

}  // namespace spadev
