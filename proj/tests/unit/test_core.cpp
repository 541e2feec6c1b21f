#include <doctest.h>

#include <cstdint>
#include <set>

#include "spadev/aer.hpp"
#include "spadev/error.hpp"
#include "spadev/seed.hpp"
#include "spadev/time_surface.hpp"
#include "spadev/types.hpp"

using namespace spadev;

namespace {

// Independent bit assembly: shift each field into place one bit at a time.
std::uint32_t assemble(std::uint32_t row, std::uint32_t col, std::uint32_t f, std::uint32_t pulse) {
  std::uint32_t w = 0;
  auto put = [&](std::uint32_t value, int width) {
    for (int b = width - 1; b >= 0; --b) w = (w << 1) | ((value >> b) & 1u);
  };
  put(row, 7);
  put(col, 7);
  put(f, 2);
  put(pulse, 16);
  return w;
}

}  // namespace

TEST_CASE("aer encode matches bitwise assembly") {
  CHECK(encode_aer(0, 0, 0, 0) == 0x00000000u);
  CHECK(encode_aer(1, 2, 3, 4) == 0x020B0004u);
  CHECK(assemble(1, 2, 3, 4) == 0x020B0004u);
  CHECK(encode_aer(127, 127, 3, 65535) == 0xFFFFFFFFu);
  for (std::uint32_t r : {0u, 5u, 64u, 127u})
    for (std::uint32_t c : {0u, 3u, 99u, 127u})
      for (std::uint32_t f = 0; f < 4; ++f)
        for (std::uint32_t p : {0u, 1u, 777u, 65535u}) CHECK(encode_aer(r, c, f, p) == assemble(r, c, f, p));
}

TEST_CASE("aer decode inverts encode") {
  CHECK(decode_aer(0) == AerFields{0, 0, 0, 0});
  CHECK(decode_aer(0x020B0004u) == AerFields{1, 2, 3, 4});
  CHECK(decode_aer(0xFFFFFFFFu) == AerFields{127, 127, 3, 65535});
  for (std::uint32_t w : {0x12345678u, 0xDEADBEEFu, 0x00010000u}) {
    const auto f = decode_aer(w);
    CHECK(encode_aer(f.row, f.col, f.feature_class, f.pulse_index) == w);
  }
}

TEST_CASE("aer rejects out of range fields") {
  CHECK_THROWS_AS(encode_aer(128, 0, 0, 0), RangeError);
  CHECK_THROWS_AS(encode_aer(0, 128, 0, 0), RangeError);
  CHECK_THROWS_AS(encode_aer(0, 0, 4, 0), RangeError);
  CHECK_THROWS_AS(encode_aer(0, 0, 0, 65536), RangeError);
}

TEST_CASE("time surface update and readout") {
  TimeSurface s(8, 8, 2);
  s.update(Event{3, 4, 100, 1});
  int fired = 0;
  for (int p = 0; p < 2; ++p)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        if (s.last_t(p, x, y) != TimeSurface::kNever) ++fired;
  CHECK(fired == 1);
  CHECK(s.last_t(1, 3, 4) == 100);

  s.update(Event{3, 4, 200, 1});
  CHECK(s.last_t(1, 3, 4) == 200);

  TimeSurface b(8, 8, 1);
  b.update(Event{1, 1, 100, 0});
  CHECK(b.active(0, 1, 1, 2099, 2000));
  CHECK_FALSE(b.active(0, 1, 1, 2100, 2000));

  CHECK_THROWS_AS(s.update(Event{8, 0, 0, 0}), RangeError);
  CHECK_THROWS_AS(s.update(Event{0, 0, 0, 2}), RangeError);
}

TEST_CASE("binary roi reads") {
  TimeSurface s(10, 10, 2);
  auto empty = read_binary_roi(s, 5, 5, 5, 0, 2000);
  CHECK(empty.empty());
  CHECK(empty.bits.size() == 2u * 25u);

  s.update(Event{5, 5, 10, 1});
  auto one = read_binary_roi(s, 5, 5, 5, 20, 2000);
  int set = 0;
  for (auto b : one.bits) set += b;
  CHECK(set == 1);
  CHECK(one.at(1, 2, 2) == 1);

  TimeSurface full(6, 6, 1);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) full.update(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), 1, 0});
  auto corner = read_binary_roi(full, 0, 0, 5, 2, 2000);
  for (int dy = 0; dy < 5; ++dy)
    for (int dx = 0; dx < 5; ++dx) CHECK(corner.at(0, dx, dy) == ((dx >= 2 && dy >= 2) ? 1 : 0));

  std::uint64_t words[2] = {0, 0};
  const int count = read_binary_roi_packed(full, 0, 0, 5, 2, 2000, words);
  CHECK(count == 9);
  for (int i = 0; i < 25; ++i) CHECK(((words[0] >> i) & 1u) == corner.bits[i]);

  CHECK_THROWS_AS(read_binary_roi(full, 0, 0, 4, 2, 2000), ConfigError);
}

TEST_CASE("stream order and well-formedness") {
  EventStream s;
  s.kind = EventKind::kOnOff;
  s.grid_width = 4;
  s.grid_height = 4;
  s.polarities = 2;
  s.events = {{0, 0, 10, 0}, {1, 0, 10, 1}, {0, 1, 20, 0}};
  CHECK(is_well_formed(s));
  CHECK(polarity_counts(s) == std::vector<std::size_t>{2, 1});
  s.events.push_back({0, 0, 5, 0});
  CHECK_FALSE(is_well_formed(s));
  s.events.back() = {4, 0, 30, 0};
  CHECK_FALSE(is_well_formed(s));
  CHECK(parse_event_kind(to_string(EventKind::kOobu)) == EventKind::kOobu);
  CHECK(polarity_count(EventKind::kFirstAnd) == 4);
  CHECK(polarity_count(EventKind::kOnOff) == 2);
  CHECK(polarity_count(EventKind::kFeature, 16) == 16);
}

TEST_CASE("derived seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, {i}));
  CHECK(seen.size() == 1000u);
  CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
  CHECK(derive_seed(7, {}) != derive_seed(8, {}));
}
