#include "spadev/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "../core/byteio.hpp"
#include "../core/parallel.hpp"
#include "spadev/error.hpp"
#include "spadev/recording_io.hpp"

namespace spadev {

void DatasetManifest::validate() const {
  std::set<std::filesystem::path> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.path).second) throw ConfigError("duplicate manifest path '" + e.path.string() + "'");
    if (e.class_id < 0 || (n_classes > 0 && e.class_id >= n_classes)) {
      throw ConfigError("manifest entry '" + e.recording_id + "' has class_id " +
                        std::to_string(e.class_id) + " outside [0, " + std::to_string(n_classes) + ")");
    }
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  const auto base = path.parent_path();
  DatasetManifest m;
  int max_class = -1;
  bool have_n_classes = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto value = kv.substr(eq + 1);
        try {
          if (key == "n_classes") {
            m.n_classes = std::stoi(value);
            have_n_classes = true;
          } else if (key == "width") {
            m.width = std::stoi(value);
          } else if (key == "height") {
            m.height = std::stoi(value);
          } else if (key == "pulse_period") {
            m.pulse_period = std::stoll(value);
          }
        } catch (const std::exception&) {
          throw ConfigError("manifest line " + std::to_string(line_no) + ": bad value for " + key);
        }
      }
      continue;
    }
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ConfigError("manifest line " + std::to_string(line_no) + ": expected path<TAB>class_id<TAB>recording_id");
    }
    ManifestEntry e;
    std::filesystem::path p = line.substr(0, tab1);
    e.path = p.is_absolute() ? p : base / p;
    try {
      std::size_t used = 0;
      const auto cls = line.substr(tab1 + 1, tab2 - tab1 - 1);
      e.class_id = std::stoi(cls, &used);
      if (used != cls.size()) throw std::invalid_argument(cls);
    } catch (const std::exception&) {
      throw ConfigError("manifest line " + std::to_string(line_no) + ": bad class_id");
    }
    e.recording_id = line.substr(tab2 + 1);
    max_class = std::max(max_class, e.class_id);
    m.entries.push_back(std::move(e));
  }
  if (!have_n_classes) m.n_classes = max_class + 1;
  m.validate();
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# n_classes=" << manifest.n_classes << " width=" << manifest.width
      << " height=" << manifest.height << " pulse_period=" << manifest.pulse_period << '\n';
  const auto base = path.parent_path();
  for (const auto& e : manifest.entries) {
    std::filesystem::path p = e.path;
    if (!base.empty()) {
      auto rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << p.generic_string() << '\t' << e.class_id << '\t' << e.recording_id << '\n';
  }
  detail::write_file(path, out.str());
}

std::vector<Recording> load_recordings(const DatasetManifest& manifest, int jobs) {
  std::vector<Recording> out(manifest.entries.size());
  detail::parallel_for(out.size(), jobs, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    out[i] = load_recording(e.path);
    out[i].class_id = e.class_id;
    out[i].recording_id = e.recording_id;
  });
  return out;
}

// Augmentation ---------------------------------------------------------------

DepthFrame rotate(const DepthFrame& frame, Rotation rotation) {
  if (rotation == Rotation::k0) return frame;
  if (rotation != Rotation::k180 && frame.width != frame.height) {
    throw ConfigError("90/270 degree rotation requires a square grid");
  }
  const int w = frame.width;
  const int h = frame.height;
  DepthFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = frame.at(x, y);
      switch (rotation) {
        case Rotation::k90: out.at(y, w - 1 - x) = v; break;
        case Rotation::k180: out.at(w - 1 - x, h - 1 - y) = v; break;
        case Rotation::k270: out.at(h - 1 - y, x) = v; break;
        case Rotation::k0: break;
      }
    }
  }
  return out;
}

DepthFrame mirror(const DepthFrame& frame) {
  DepthFrame out(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) out.at(frame.width - 1 - x, y) = frame.at(x, y);
  }
  return out;
}

std::vector<Recording> augment(const std::vector<Recording>& recordings) {
  static constexpr Rotation kRotations[] = {Rotation::k0, Rotation::k90, Rotation::k180, Rotation::k270};
  static constexpr const char* kNames[] = {"r0", "r90", "r180", "r270"};
  for (const auto& r : recordings) {
    if (r.width() != r.height()) throw ConfigError("augmentation requires square frames");
  }
  std::vector<Recording> out;
  out.reserve(recordings.size() * 8);
  for (const auto& r : recordings) {
    for (int ri = 0; ri < 4; ++ri) {
      for (int mi = 0; mi < 2; ++mi) {
        Recording a;
        a.pulse_period = r.pulse_period;
        a.class_id = r.class_id;
        a.recording_id = r.recording_id + "_" + kNames[ri] + (mi ? "m" : "");
        a.frames.reserve(r.frames.size());
        for (const auto& f : r.frames) {
          auto g = rotate(f, kRotations[ri]);
          a.frames.push_back(mi ? mirror(g) : std::move(g));
        }
        out.push_back(std::move(a));
      }
    }
  }
  return out;
}

// Splitting ------------------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie strictly between 0 and 1");
  }
  if (n == 0) throw ConfigError("cannot split an empty dataset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  else n_train = n;
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {std::move(train), std::move(test)};
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double train_fraction, std::uint64_t seed) {
  if (manifest.entries.empty()) throw ConfigError("cannot split an empty manifest");
  auto [train_idx, test_idx] = split_indices(manifest.entries.size(), train_fraction, seed);
  DatasetManifest train = manifest;
  DatasetManifest test = manifest;
  train.entries.clear();
  test.entries.clear();
  for (auto i : train_idx) train.entries.push_back(manifest.entries[i]);
  for (auto i : test_idx) test.entries.push_back(manifest.entries[i]);
  return {std::move(train), std::move(test)};
}

// Import ---------------------------------------------------------------------

namespace {

Recording read_raw16(const std::filesystem::path& path, const ManifestEntry& entry,
                     const ImportOptions& opts) {
  if (opts.width <= 0 || opts.height <= 0) throw ConfigError("raw16 import needs positive width/height");
  const std::string bytes = detail::read_file(path);
  const std::size_t frame_bytes = static_cast<std::size_t>(opts.width) * opts.height * 2;
  if (bytes.size() % frame_bytes != 0) {
    throw ParseError(ErrorCode::kTruncated, "raw16 file '" + path.string() + "' is not a whole number of frames");
  }
  detail::ByteReader in(bytes);
  Recording rec;
  rec.pulse_period = opts.pulse_period;
  rec.class_id = entry.class_id;
  rec.recording_id = entry.recording_id;
  for (std::size_t f = 0; f < bytes.size() / frame_bytes; ++f) {
    DepthFrame frame(opts.width, opts.height);
    for (auto& code : frame.depth_codes) code = in.u16();
    rec.frames.push_back(std::move(frame));
  }
  return rec;
}

std::map<std::string, RecordingReader>& registry() {
  static std::map<std::string, RecordingReader> readers = {
      {"spdrec",
       [](const std::filesystem::path& path, const ManifestEntry& entry, const ImportOptions&) {
         auto rec = load_recording(path);
         rec.class_id = entry.class_id;
         rec.recording_id = entry.recording_id;
         return rec;
       }},
      {"raw16", read_raw16},
  };
  return readers;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void register_reader(const std::string& format, RecordingReader reader) {
  std::lock_guard lock(registry_mutex());
  registry()[format] = std::move(reader);
}

const RecordingReader& find_reader(const std::string& format) {
  std::lock_guard lock(registry_mutex());
  auto it = registry().find(format);
  if (it == registry().end()) throw ConfigError("no import reader registered for format '" + format + "'");
  return it->second;
}

std::vector<std::string> reader_formats() {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

}  // namespace spadev
