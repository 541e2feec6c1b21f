#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "spadev/dataset.hpp"
#include "spadev/error.hpp"
#include "spadev/recording_io.hpp"
#include "spadev/synth.hpp"
#include "test_util.hpp"

using namespace spadev;

namespace {

Recording small_recording(int w, int h, int frames, int class_id) {
  Recording r;
  r.class_id = class_id;
  r.recording_id = "rec";
  for (int k = 0; k < frames; ++k) {
    DepthFrame f(w, h);
    for (std::size_t i = 0; i < f.depth_codes.size(); ++i) f.depth_codes[i] = static_cast<std::uint16_t>(i * 7 + k * 131);
    r.frames.push_back(f);
  }
  return r;
}

ErrorCode parse_code(const std::string& bytes) {
  try {
    parse_recording(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

std::multiset<std::uint16_t> codes_of(const DepthFrame& f) { return {f.depth_codes.begin(), f.depth_codes.end()}; }

std::size_t nonzero(const DepthFrame& f) {
  return static_cast<std::size_t>(std::count_if(f.depth_codes.begin(), f.depth_codes.end(), [](auto c) { return c != 0; }));
}

}  // namespace

TEST_CASE("recording container round trip") {
  const auto rec = small_recording(5, 3, 4, 7);
  const auto bytes = serialize_recording(rec);
  CHECK(bytes.size() == 22u + 4u * 5u * 3u * 2u);
  CHECK(bytes.substr(0, 8) == "SPDREC01");
  // Header field offsets: width, height, frame count, period, class id.
  CHECK(static_cast<unsigned char>(bytes[8]) == 5);
  CHECK(static_cast<unsigned char>(bytes[10]) == 3);
  CHECK(static_cast<unsigned char>(bytes[12]) == 4);
  CHECK(static_cast<unsigned char>(bytes[16]) == 10);
  CHECK(static_cast<unsigned char>(bytes[20]) == 7);
  auto back = parse_recording(bytes, "rec");
  CHECK(back == rec);

  testutil::TempDir dir;
  save_recording(rec, dir / "abc.spdrec");
  const auto loaded = load_recording(dir / "abc.spdrec");
  CHECK(loaded.recording_id == "abc");
  CHECK(loaded.frames == rec.frames);
}

TEST_CASE("recording container errors") {
  auto bytes = serialize_recording(small_recording(4, 4, 10, 0));
  auto bad = bytes;
  bad.replace(0, 8, "XXXXXXXX");
  CHECK(parse_code(bad) == ErrorCode::kBadMagic);
  CHECK(parse_code(bytes.substr(0, bytes.size() - 32)) == ErrorCode::kTruncated);
  CHECK(parse_code(bytes.substr(0, 10)) == ErrorCode::kTruncated);
  CHECK(parse_code(bytes + "zz") == ErrorCode::kDimensionOverflow);
  CHECK_THROWS_AS(load_recording("/nonexistent/dir/x.spdrec"), IoError);
}

TEST_CASE("manifest round trip with relative paths") {
  testutil::TempDir dir;
  DatasetManifest m;
  m.n_classes = 3;
  m.width = 32;
  m.height = 32;
  std::filesystem::create_directories(dir / "recordings");
  m.entries = {{dir / "recordings/a.spdrec", 0, "a"}, {dir / "recordings/b.spdrec", 2, "b"}};
  save_manifest(m, dir / "manifest.tsv");
  const auto text = testutil::read_file(dir / "manifest.tsv");
  CHECK(text.find("recordings/a.spdrec\t0\ta") != std::string::npos);
  const auto back = load_manifest(dir / "manifest.tsv");
  CHECK(back.n_classes == 3);
  REQUIRE(back.entries.size() == 2u);
  CHECK(back.entries[1].class_id == 2);
  CHECK(std::filesystem::equivalent(back.entries[0].path.parent_path(), dir / "recordings"));
  DatasetManifest dup = m;
  dup.entries.push_back(m.entries[0]);
  CHECK_THROWS_AS(dup.validate(), ConfigError);
  DatasetManifest label = m;
  label.entries[0].class_id = 3;
  CHECK_THROWS_AS(label.validate(), ConfigError);
}

TEST_CASE("rotation and mirror move single pixels") {
  DepthFrame f(5, 5);
  f.at(1, 0) = 9;
  auto r90 = rotate(f, Rotation::k90);
  CHECK(r90.at(0, 5 - 1 - 1) == 9);
  CHECK(nonzero(r90) == 1u);
  auto r180 = rotate(f, Rotation::k180);
  CHECK(r180.at(3, 4) == 9);
  CHECK(rotate(rotate(f, Rotation::k90), Rotation::k270) == f);
  auto m = mirror(f);
  CHECK(m.at(3, 0) == 9);
  CHECK(mirror(m) == f);
}

TEST_CASE("augmentation is eightfold and preserves content") {
  std::vector<Recording> in;
  for (int i = 0; i < 3; ++i) {
    auto r = small_recording(6, 6, 3, i);
    r.recording_id = "r" + std::to_string(i);
    in.push_back(r);
  }
  const auto out = augment(in);
  REQUIRE(out.size() == 24u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& src = in[i / 8];
    CHECK(out[i].class_id == src.class_id);
    ids.insert(out[i].recording_id);
    for (std::size_t k = 0; k < src.frames.size(); ++k) {
      CHECK(nonzero(out[i].frames[k]) == nonzero(src.frames[k]));
      CHECK(codes_of(out[i].frames[k]) == codes_of(src.frames[k]));
    }
  }
  CHECK(ids.size() == 24u);
  auto rect = small_recording(6, 4, 1, 0);
  CHECK_THROWS_AS(augment({rect}), ConfigError);
}

TEST_CASE("split partitions at recording granularity") {
  auto [tr, te] = split_indices(24000, 0.9, 1);
  CHECK(tr.size() == 21600u);
  CHECK(te.size() == 2400u);
  std::vector<std::size_t> all(tr);
  all.insert(all.end(), te.begin(), te.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) REQUIRE(all[i] == i);
  CHECK(split_indices(24000, 0.9, 1) == split_indices(24000, 0.9, 1));

  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    if (split_indices(50, 0.5, s).first != split_indices(50, 0.5, s + 1000).first) ++differing;
  CHECK(differing >= 1);

  auto [a, b] = split_indices(2, 0.99, 3);
  CHECK(a.size() == 1u);
  CHECK(b.size() == 1u);

  DatasetManifest m;
  m.n_classes = 1;
  for (int i = 0; i < 10; ++i) m.entries.push_back({"r" + std::to_string(i), 0, "r" + std::to_string(i)});
  auto [mt, me] = split(m, 0.7, 5);
  CHECK(mt.entries.size() == 7u);
  CHECK(me.entries.size() == 3u);
  DatasetManifest empty;
  CHECK_THROWS(split(empty, 0.9, 1));
}

TEST_CASE("synthesis is deterministic regardless of jobs") {
  SynthConfig c;
  c.n_classes = 3;
  c.recordings_per_class = 4;
  c.frames_per_recording = 20;
  const auto a = synth_generate(c, 1);
  const auto b = synth_generate(c, 3);
  CHECK(a.recordings == b.recordings);
  CHECK(a.manifest.entries == b.manifest.entries);
  c.seed = 2;
  CHECK_FALSE(synth_generate(c, 1).recordings == a.recordings);
}

TEST_CASE("noiseless synthesis is silhouette plus distractor") {
  SynthConfig c;
  c.n_classes = 2;
  c.recordings_per_class = 2;
  c.frames_per_recording = 60;
  c.p_false_positive = 0;
  c.p_false_negative = 0;
  c.timing_jitter_sigma = 0;
  const auto ds = synth_generate(c);
  const auto shapes = shape_library(2);
  DepthFrame base = compose_frame(c, Mask{1, 1, {0}}, -10, -10, 0, 0);
  for (const auto& rec : ds.recordings) {
    const Mask& shape = shapes[static_cast<std::size_t>(rec.class_id)];
    for (std::size_t k = 0; k < rec.frames.size(); k += 7) {
      const auto& f = rec.frames[k];
      bool matched = false;
      for (int oy = -shape.height; oy <= c.height && !matched; ++oy) {
        for (int ox = -shape.width; ox <= c.width && !matched; ++ox) {
          DepthFrame expect = base;
          for (int y = 0; y < shape.height; ++y)
            for (int x = 0; x < shape.width; ++x) {
              const int gx = ox + x, gy = oy + y;
              if (shape.at(x, y) && gx >= 0 && gy >= 0 && gx < c.width && gy < c.height) expect.at(gx, gy) = c.target_code;
            }
          matched = expect == f;
        }
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("full dropout removes the target") {
  SynthConfig c;
  c.n_classes = 2;
  c.recordings_per_class = 1;
  c.frames_per_recording = 30;
  c.p_false_positive = 0;
  c.p_false_negative = 1;
  for (const auto& rec : synth_generate(c).recordings)
    for (const auto& f : rec.frames)
      for (auto code : f.depth_codes) CHECK(code == 0);
}

TEST_CASE("synth validation") {
  SynthConfig c;
  c.recordings_per_class = 0;
  CHECK_THROWS_AS(synth_generate(c), ConfigError);
  c = SynthConfig{};
  c.p_false_positive = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SynthConfig{};
  c.n_classes = 2;
  c.target_shapes = {mask_from_rows({"##", "##"}), mask_from_rows({"##", "##"})};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const auto lib = shape_library(15);
  for (std::size_t i = 0; i < lib.size(); ++i)
    for (std::size_t j = i + 1; j < lib.size(); ++j) CHECK_FALSE(lib[i] == lib[j]);
}

TEST_CASE("written dataset loads back through the manifest") {
  testutil::TempDir dir;
  SynthConfig c;
  c.n_classes = 2;
  c.recordings_per_class = 2;
  c.frames_per_recording = 5;
  const auto ds = synth_generate(c);
  write_dataset(ds, dir.path());
  const auto m = load_manifest(dir / "manifest.tsv");
  CHECK(m.n_classes == 2);
  const auto recs = load_recordings(m, 2);
  REQUIRE(recs.size() == ds.recordings.size());
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i] == ds.recordings[i]);
}

TEST_CASE("import readers") {
  testutil::TempDir dir;
  std::string raw;
  for (int i = 0; i < 2 * 4 * 3; ++i) {
    raw.push_back(static_cast<char>(i));
    raw.push_back(0);
  }
  testutil::write_file(dir / "x.raw", raw);
  ImportOptions opts;
  opts.width = 4;
  opts.height = 3;
  const auto rec = find_reader("raw16")(dir / "x.raw", {dir / "x.raw", 1, "x"}, opts);
  CHECK(rec.frames.size() == 2u);
  CHECK(rec.frames[1].at(0, 0) == 12);
  CHECK(rec.class_id == 1);
  testutil::write_file(dir / "y.raw", raw + "a");
  CHECK_THROWS_AS(find_reader("raw16")(dir / "y.raw", {dir / "y.raw", 0, "y"}, opts), ParseError);
  CHECK_THROWS_AS(find_reader("nope"), ConfigError);
  register_reader("const", [](const std::filesystem::path&, const ManifestEntry& e, const ImportOptions&) {
    Recording r;
    r.frames.push_back(DepthFrame(2, 2));
    r.class_id = e.class_id;
    return r;
  });
  const auto formats = reader_formats();
  CHECK(std::find(formats.begin(), formats.end(), "const") != formats.end());
  CHECK(std::find(formats.begin(), formats.end(), "spdrec") != formats.end());
}
