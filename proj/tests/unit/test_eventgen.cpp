#include <doctest.h>

#include <algorithm>
#include <array>

#include "spadev/error.hpp"
#include "spadev/eventgen.hpp"
#include "spadev/stream_io.hpp"
#include "test_util.hpp"

using namespace spadev;

namespace {

DepthFrame grid4(const std::array<std::array<int, 4>, 4>& rows) {
  DepthFrame f(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) f.at(x, y) = static_cast<std::uint16_t>(rows[y][x]);
  return f;
}

// Reference gate race: each border bar fires at its latest input; a zero blocks it.
std::optional<std::uint16_t> brute_force_winner(const DepthFrame& f) {
  std::array<std::array<std::pair<int, int>, 4>, 4> bars{};
  for (int i = 0; i < 4; ++i) {
    bars[0][i] = {i, 0};
    bars[1][i] = {i, 3};
    bars[2][i] = {3, i};
    bars[3][i] = {0, i};
  }
  int best = -1;
  int best_time = 1 << 30;
  for (int g = 0; g < 4; ++g) {
    int latest = 0;
    bool complete = true;
    for (auto [x, y] : bars[g]) {
      const int c = f.at(x, y);
      if (c == 0) complete = false;
      latest = std::max(latest, c);
    }
    if (complete && latest < best_time) {
      best = g;
      best_time = latest;
    }
  }
  if (best < 0) return std::nullopt;
  return static_cast<std::uint16_t>(best);
}

Recording repeated(const DepthFrame& f, int frames) {
  Recording r;
  r.frames.assign(static_cast<std::size_t>(frames), f);
  return r;
}

Recording pair(const DepthFrame& a, const DepthFrame& b) {
  Recording r;
  r.frames = {a, b};
  return r;
}

std::size_t count_pol(const EventStream& s, std::uint16_t p) {
  return static_cast<std::size_t>(std::count_if(s.events.begin(), s.events.end(), [&](const Event& e) { return e.polarity == p; }));
}

}  // namespace

TEST_CASE("first-and pulse winner") {
  const auto gates = GateBank::borders();
  const auto top = grid4({{{5, 6, 7, 8}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}});
  CHECK(firstand_pulse_winner(top, 0, 0, gates) == gate::kNorth);
  const auto all5 = grid4({{{5, 5, 5, 5}, {5, 5, 5, 5}, {5, 5, 5, 5}, {5, 5, 5, 5}}});
  CHECK(firstand_pulse_winner(all5, 0, 0, gates) == gate::kNorth);
  const auto s_wins = grid4({{{5, 6, 7, 9}, {0, 0, 0, 0}, {0, 0, 0, 0}, {1, 2, 3, 4}}});
  CHECK(brute_force_winner(s_wins) == gate::kSouth);
  CHECK(firstand_pulse_winner(s_wins, 0, 0, gates) == gate::kSouth);
  CHECK_FALSE(firstand_pulse_winner(DepthFrame(4, 4), 0, 0, gates).has_value());

  // Exhaustive-ish agreement with the reference on pseudo-random grids.
  std::uint32_t state = 12345;
  for (int trial = 0; trial < 2000; ++trial) {
    DepthFrame f(4, 4);
    for (auto& c : f.depth_codes) {
      state = state * 1664525u + 1013904223u;
      const int v = static_cast<int>((state >> 16) % 12);
      c = static_cast<std::uint16_t>(v < 2 ? 0 : v);
    }
    REQUIRE(firstand_pulse_winner(f, 0, 0, gates) == brute_force_winner(f));
  }
}

TEST_CASE("first-and counter step") {
  FirstAndParams p;
  auto r = firstand_rf_step({gate::kNorth, 5}, gate::kNorth, p);
  CHECK(r.emitted == gate::kNorth);
  CHECK(r.state == RfState{gate::kNorth, 0});

  r = firstand_rf_step({gate::kNorth, 1}, gate::kSouth, p);
  CHECK_FALSE(r.emitted.has_value());
  CHECK(r.state == RfState{gate::kSouth, 1});

  r = firstand_rf_step({gate::kNorth, 3}, gate::kEast, p);
  CHECK(r.state == RfState{gate::kNorth, 2});

  r = firstand_rf_step({gate::kWest, 4}, std::nullopt, p);
  CHECK(r.state == RfState{gate::kWest, 4});
  CHECK_FALSE(r.emitted.has_value());

  FirstAndParams high;
  high.phi = 7;
  RfState s{gate::kNorth, 7};
  r = firstand_rf_step(s, gate::kNorth, high);
  CHECK(r.emitted == gate::kNorth);
  FirstAndParams bad;
  bad.phi = 8;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("constant winner emits every phi pulses") {
  // Hand trace from reset (stored N, counter 0): counter climbs 1..6, emits at 6, resets.
  RfState s;
  std::vector<int> emitted_at;
  for (int pulse = 1; pulse <= 60; ++pulse) {
    auto r = firstand_rf_step(s, gate::kNorth, FirstAndParams{});
    s = r.state;
    if (r.emitted) emitted_at.push_back(pulse);
  }
  CHECK(emitted_at == std::vector<int>{6, 12, 18, 24, 30, 36, 42, 48, 54, 60});

  const auto top = grid4({{{5, 6, 7, 8}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}});
  for (int T : {1, 5, 6, 7, 60, 61, 100}) {
    const auto stream = firstand_convert(repeated(top, T), GateBank::borders(), FirstAndParams{});
    CHECK(stream.events.size() == static_cast<std::size_t>(T / 6));
  }
  const auto stream = firstand_convert(repeated(top, 60), GateBank::borders(), FirstAndParams{});
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    CHECK(stream.events[i].t == static_cast<Micros>(6 * (i + 1) - 1) * kDefaultPulsePeriod);
    CHECK(stream.events[i].polarity == gate::kNorth);
  }
}

TEST_CASE("first-and tiling and static square") {
  const FirstAndParams p;
  CHECK(firstand_convert(repeated(DepthFrame(32, 32), 1), GateBank::borders(), p).grid_width == 29);
  const auto big = firstand_convert(repeated(DepthFrame(128, 128), 1), GateBank::borders(), p);
  CHECK(big.grid_width == 125);
  CHECK(big.grid_height == 125);
  CHECK(big.events.empty());

  DepthFrame f(10, 10);
  for (int y = 3; y < 7; ++y)
    for (int x = 2; x < 6; ++x) f.at(x, y) = 40;
  const auto s = firstand_convert(repeated(f, 12), GateBank::borders(), p);
  const auto own = std::count_if(s.events.begin(), s.events.end(), [](const Event& e) { return e.x == 2 && e.y == 3; });
  CHECK(own == 2);
  CHECK(is_well_formed(s));
}

TEST_CASE("first-and fifo drops excess events") {
  DepthFrame f(8, 4);
  for (int x = 0; x < 8; ++x) f.at(x, 0) = 3;
  FirstAndParams unlimited;
  const auto all = firstand_convert(repeated(f, 6), GateBank::borders(), unlimited);
  CHECK(all.events.size() == 5u);
  FirstAndParams limited;
  limited.fifo_capacity_per_pulse = 2;
  FirstAndStats stats;
  const auto some = firstand_convert(repeated(f, 12), GateBank::borders(), limited, &stats);
  CHECK(some.events.size() == 4u);
  CHECK(stats.dropped_events == 6u);
  CHECK(some.events[0].x == 0);
  CHECK(some.events[1].x == 1);
}

TEST_CASE("on-off thresholds") {
  DepthFrame a(3, 1), b(3, 1);
  a.depth_codes = {10, 10, 10};
  b.depth_codes = {13, 9, 10};
  const auto s = onoff_convert(pair(a, b), OnOffParams{});
  REQUIRE(s.events.size() == 1u);
  CHECK(s.events[0] == Event{0, 0, kDefaultPulsePeriod, oobu::kOn});
  OnOffParams flipped;
  flipped.on_is_increase = false;
  CHECK(onoff_convert(pair(a, b), flipped).events[0].polarity == oobu::kOff);
  CHECK(onoff_convert(pair(a, a), OnOffParams{}).events.empty());

  DepthFrame gone(3, 1);
  gone.depth_codes = {0, 10, 10};
  const auto g = onoff_convert(pair(a, gone), OnOffParams{});
  REQUIRE(g.events.size() == 1u);
  CHECK(g.events[0].polarity == oobu::kOff);
}

TEST_CASE("oobu neighborhood decisions") {
  CHECK(oobu_classify(3, 0, 2, 1) == oobu::kUni);
  CHECK(oobu_classify(0, 3, 2, 1) == oobu::kUni);
  CHECK(oobu_classify(2, 2, 2, 1) == oobu::kBi);
  CHECK_FALSE(oobu_classify(1, 1, 2, 1).has_value());
  CHECK_FALSE(oobu_classify(2, 0, 2, 1).has_value());
  CHECK_FALSE(oobu_classify(2, 1, 2, 1).has_value());

  // Three On pixels in a row: only the middle one sees all three.
  DepthFrame a(5, 3), b(5, 3);
  for (int x = 1; x < 4; ++x) {
    a.at(x, 1) = 10;
    b.at(x, 1) = 20;
  }
  const auto s = oobu_convert(pair(a, b), OobuParams{});
  CHECK(count_pol(s, oobu::kOn) == 3u);
  REQUIRE(count_pol(s, oobu::kUni) == 1u);
  const auto uni = *std::find_if(s.events.begin(), s.events.end(), [](const Event& e) { return e.polarity == oobu::kUni; });
  CHECK(uni.x == 2);
  CHECK(uni.y == 1);
  CHECK(is_well_formed(s));

  // 2 On + 2 Off in a 2x2 block: every pixel sees 2/2.
  DepthFrame c(4, 4), d(4, 4);
  c.at(1, 1) = 10; d.at(1, 1) = 20;
  c.at(2, 1) = 10; d.at(2, 1) = 20;
  c.at(1, 2) = 20; d.at(1, 2) = 10;
  c.at(2, 2) = 20; d.at(2, 2) = 10;
  const auto bi = oobu_convert(pair(c, d), OobuParams{});
  CHECK(count_pol(bi, oobu::kBi) == 4u);
  CHECK(count_pol(bi, oobu::kUni) == 0u);
}

TEST_CASE("converters are deterministic and need enough frames") {
  DepthFrame a(6, 6), b(6, 6);
  b.at(2, 2) = 50;
  b.at(3, 2) = 50;
  const auto r = pair(a, b);
  CHECK(oobu_convert(r, OobuParams{}) == oobu_convert(r, OobuParams{}));
  CHECK_THROWS_AS(onoff_convert(repeated(a, 1), OnOffParams{}), ConfigError);
  CHECK_THROWS_AS(oobu_convert(repeated(a, 1), OobuParams{}), ConfigError);
  CHECK(firstand_convert(repeated(a, 5), GateBank::borders(), FirstAndParams{}).events.empty());
}

TEST_CASE("ratio demo splits") {
  std::vector<LabeledCounts> sep;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 5; ++i) sep.push_back({c, 1.0 + c * 10 + i, 1.0});
  CHECK(best_two_threshold_split(sep).accuracy == doctest::Approx(1.0));

  std::vector<LabeledCounts> reversed;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 5; ++i) reversed.push_back({c, 100.0 - c * 10 - i, 1.0});
  CHECK(best_two_threshold_split(reversed).accuracy == doctest::Approx(1.0));

  std::vector<LabeledCounts> same;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 4; ++i) same.push_back({c, 2.0, 1.0});
  CHECK(best_two_threshold_split(same).accuracy == doctest::Approx(1.0 / 3.0));

  std::vector<LabeledCounts> inf = {{0, 1, 1}, {1, 3, 1}, {2, 5, 0}};
  const auto split = best_two_threshold_split(inf);
  CHECK(split.accuracy == doctest::Approx(1.0));
  CHECK(split.interval_class[2] == 2);

  std::vector<LabeledCounts> two = {{0, 1, 1}, {1, 2, 1}};
  CHECK_THROWS_AS(best_two_threshold_split(two), ConfigError);
}

TEST_CASE("data rate arithmetic") {
  Recording r = repeated(DepthFrame(32, 32), 100);
  EventStream s;
  CHECK(datarate_stats(r, s).fold_reduction == doctest::Approx(204800.0));
  s.events.resize(640);
  const auto d = datarate_stats(r, s);
  CHECK(d.frame_bytes == 204800u);
  CHECK(d.event_bytes == 2560u);
  CHECK(d.fold_reduction == doctest::Approx(80.0));
}

TEST_CASE("event file round trip") {
  EventStream s;
  s.kind = EventKind::kOobu;
  s.grid_width = 32;
  s.grid_height = 32;
  s.polarities = 4;
  s.events = {{1, 2, 10, 0}, {31, 0, 20, 3}, {5, 5, 655360, 1}, {6, 5, 655360 + 30000 * 10, 2}};
  const auto bytes = serialize_stream(s, 10);
  CHECK(bytes.size() == kStreamHeaderBytes + 16u);
  CHECK(bytes.substr(0, 8) == "SPDEVT01");
  CHECK(parse_stream(bytes, 10) == s);

  testutil::TempDir dir;
  save_stream(s, dir / "s.spdevt", 10);
  CHECK(load_stream(dir / "s.spdevt", 10) == s);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(parse_stream(bad, 10), ParseError);
  try {
    parse_stream(bytes.substr(0, bytes.size() - 2), 10);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTruncated);
  }
  try {
    parse_stream(bytes + "abcd", 10);
    FAIL("expected trailing-byte rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionOverflow);
  }

  EventStream wide = s;
  wide.kind = EventKind::kFeature;
  wide.polarities = 16;
  wide.events = {{0, 0, 0, 9}};
  CHECK_THROWS_AS(serialize_stream(wide, 10), RangeError);
  EventStream huge = s;
  huge.grid_width = 200;
  CHECK_THROWS_AS(serialize_stream(huge, 10), RangeError);
}
