#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "spadev/error.hpp"
#include "spadev/eventgen.hpp"

namespace spadev {

RatioSplit best_two_threshold_split(std::span<const LabeledCounts> samples) {
  std::set<int> classes;
  for (const auto& s : samples) classes.insert(s.class_id);
  if (classes.size() != 3) {
    throw ConfigError("ratio demo needs exactly three classes, got " + std::to_string(classes.size()));
  }
  const std::array<int, 3> cls{*classes.begin(), *std::next(classes.begin()), *classes.rbegin()};
  auto slot = [&](int c) { return static_cast<std::size_t>(std::find(cls.begin(), cls.end(), c) - cls.begin()); };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Group equal ratios; cuts may only fall between groups.
  std::map<double, std::array<int, 3>> groups;
  for (const auto& s : samples) {
    const double r = s.denominator == 0 ? kInf : s.numerator / s.denominator;
    ++groups[r][slot(s.class_id)];
  }
  std::vector<double> values;
  std::vector<std::array<int, 3>> prefix(1, {0, 0, 0});
  for (const auto& [v, c] : groups) {
    values.push_back(v);
    auto next = prefix.back();
    for (int i = 0; i < 3; ++i) next[i] += c[i];
    prefix.push_back(next);
  }
  const std::size_t g = values.size();
  auto cut_value = [&](std::size_t i) {
    if (i == 0) return -kInf;
    if (i == g) return kInf;
    return values[i] == kInf ? kInf : 0.5 * (values[i - 1] + values[i]);
  };

  std::array<int, 3> perm{0, 1, 2};
  RatioSplit best;
  int best_correct = -1;
  do {
    for (std::size_t i = 0; i <= g; ++i) {
      for (std::size_t j = i; j <= g; ++j) {
        const int correct = prefix[i][perm[0]] + (prefix[j][perm[1]] - prefix[i][perm[1]]) +
                            (prefix[g][perm[2]] - prefix[j][perm[2]]);
        if (correct > best_correct) {
          best_correct = correct;
          best.low_threshold = cut_value(i);
          best.high_threshold = cut_value(j);
          best.interval_class = {cls[perm[0]], cls[perm[1]], cls[perm[2]]};
        }
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.accuracy = static_cast<double>(best_correct) / static_cast<double>(samples.size());
  return best;
}

RatioDemoResult count_ratio_demo(std::span<const EventStream> oobu_streams, std::span<const int> class_ids) {
  if (oobu_streams.size() != class_ids.size()) throw ConfigError("one class id per stream required");
  std::vector<LabeledCounts> onoff;
  std::vector<LabeledCounts> biuni;
  for (std::size_t i = 0; i < oobu_streams.size(); ++i) {
    const auto& s = oobu_streams[i];
    if (s.kind != EventKind::kOobu) throw ConfigError("ratio demo expects OOBU streams");
    const auto c = polarity_counts(s);
    onoff.push_back({class_ids[i], static_cast<double>(c[oobu::kOn]), static_cast<double>(c[oobu::kOff])});
    biuni.push_back({class_ids[i], static_cast<double>(c[oobu::kBi]), static_cast<double>(c[oobu::kUni])});
  }
  return {best_two_threshold_split(onoff), best_two_threshold_split(biuni)};
}

DataRate datarate_stats(const Recording& recording, const EventStream& stream) {
  DataRate r;
  r.frame_bytes = static_cast<std::uint64_t>(recording.frames.size()) * recording.width() * recording.height() * 2;
  r.event_bytes = 4 * static_cast<std::uint64_t>(stream.events.size());
  r.fold_reduction = static_cast<double>(r.frame_bytes) / static_cast<double>(std::max<std::uint64_t>(r.event_bytes, 1));
  return r;
}

}  // namespace spadev
