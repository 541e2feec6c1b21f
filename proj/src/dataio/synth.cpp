#include "spadev/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "../core/parallel.hpp"
#include "spadev/error.hpp"
#include "spadev/recording_io.hpp"
#include "spadev/seed.hpp"

namespace spadev {

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

Mask mask_from_rows(const std::vector<std::string>& rows) {
  Mask m;
  m.height = static_cast<int>(rows.size());
  m.width = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != m.width) throw ConfigError("mask rows differ in length");
    for (char c : r) m.cells.push_back((c == '#' || c == '1') ? 1 : 0);
  }
  return m;
}

namespace {

// clang-format off
const std::vector<std::vector<std::string>> kShapeArt = {
  {  // solid block
    "##########",
    "##########",
    "##########",
    "##########",
    "##########",
    "##########",
    "##########",
    "##########",
  },
  {  // horizontal comb
    "############",
    "............",
    "############",
    "............",
    "############",
    "............",
    "############",
    "............",
    "############",
  },
  {  // outline
    "##########",
    "#........#",
    "#........#",
    "#........#",
    "#........#",
    "#........#",
    "#........#",
    "#........#",
    "#........#",
    "##########",
  },
  {  // thick plus
    "....###....",
    "....###....",
    "....###....",
    "....###....",
    "###########",
    "###########",
    "###########",
    "....###....",
    "....###....",
    "....###....",
    "....###....",
  },
  {  // cross
    "##.......##",
    "###.....###",
    ".###...###.",
    "..###.###..",
    "...#####...",
    "....###....",
    "...#####...",
    "..###.###..",
    ".###...###.",
    "###.....###",
    "##.......##",
  },
  {  // triangle
    ".....#.....",
    "....###....",
    "....###....",
    "...#####...",
    "...#####...",
    "..#######..",
    "..#######..",
    ".#########.",
    ".#########.",
    "###########",
  },
  {  // vertical comb
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
    "#.#.#.#.#.#",
  },
  {  // disc
    "...#####...",
    ".#########.",
    ".#########.",
    "###########",
    "###########",
    "###########",
    "###########",
    "###########",
    ".#########.",
    ".#########.",
    "...#####...",
  },
  {  // T
    "###########",
    "###########",
    "###########",
    "....###....",
    "....###....",
    "....###....",
    "....###....",
    "....###....",
    "....###....",
    "....###....",
  },
  {  // H
    "###.....###",
    "###.....###",
    "###.....###",
    "###.....###",
    "###########",
    "###########",
    "###.....###",
    "###.....###",
    "###.....###",
    "###.....###",
  },
  {  // L
    "###.......",
    "###.......",
    "###.......",
    "###.......",
    "###.......",
    "###.......",
    "###.......",
    "##########",
    "##########",
    "##########",
  },
  {  // checkerboard
    "##..##..##..",
    "##..##..##..",
    "..##..##..##",
    "..##..##..##",
    "##..##..##..",
    "##..##..##..",
    "..##..##..##",
    "..##..##..##",
  },
  {  // diamond
    ".....#.....",
    "....###....",
    "...#####...",
    "..#######..",
    ".#########.",
    "###########",
    ".#########.",
    "..#######..",
    "...#####...",
    "....###....",
    ".....#.....",
  },
  {  // hollow diamond
    ".....#.....",
    "....#.#....",
    "...#...#...",
    "..#.....#..",
    ".#.......#.",
    "#.........#",
    ".#.......#.",
    "..#.....#..",
    "...#...#...",
    "....#.#....",
    ".....#.....",
  },
  {  // twin blocks
    "####....####",
    "####....####",
    "####....####",
    "####....####",
    "####....####",
    "####....####",
  },
};
// clang-format on

Mask random_blob(int index) {
  std::mt19937_64 rng(derive_seed(0xB10B, {static_cast<std::uint64_t>(index)}));
  constexpr int kSide = 10;
  Mask m;
  m.width = m.height = kSide;
  m.cells.assign(kSide * kSide, 0);
  std::uniform_int_distribution<int> step(0, 3);
  int x = kSide / 2;
  int y = kSide / 2;
  for (int i = 0; i < 60; ++i) {
    m.cells[static_cast<std::size_t>(y) * kSide + x] = 1;
    switch (step(rng)) {
      case 0: x = std::min(x + 1, kSide - 1); break;
      case 1: x = std::max(x - 1, 0); break;
      case 2: y = std::min(y + 1, kSide - 1); break;
      default: y = std::max(y - 1, 0); break;
    }
  }
  return m;
}

Mask default_distractor() { return mask_from_rows(std::vector<std::string>(6, std::string(10, '#'))); }

}  // namespace

std::vector<Mask> shape_library(int n) {
  std::vector<Mask> shapes;
  for (int i = 0; i < n; ++i) {
    if (i < static_cast<int>(kShapeArt.size())) shapes.push_back(mask_from_rows(kShapeArt[i]));
    else shapes.push_back(random_blob(i));
  }
  return shapes;
}

Direction parse_direction(const std::string& name) {
  if (name == "down") return Direction::kDown;
  if (name == "up") return Direction::kUp;
  if (name == "left") return Direction::kLeft;
  if (name == "right") return Direction::kRight;
  throw ConfigError("unknown direction '" + name + "'");
}

void SynthConfig::validate() const {
  if (n_classes <= 0) throw ConfigError("n_classes must be positive");
  if (recordings_per_class <= 0) throw ConfigError("recordings_per_class must be positive");
  if (frames_per_recording <= 0) throw ConfigError("frames_per_recording must be positive");
  if (width <= 0 || height <= 0) throw ConfigError("grid dimensions must be positive");
  if (pulse_period <= 0) throw ConfigError("pulse_period must be positive");
  auto prob = [](const char* name, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  prob("p_false_positive", p_false_positive);
  prob("p_false_negative", p_false_negative);
  if (!(timing_jitter_sigma >= 0.0)) throw ConfigError("timing_jitter_sigma must be >= 0");
  if (!(speed >= 0.0) || !(speed_jitter >= 0.0)) throw ConfigError("speed and speed_jitter must be >= 0");
  if (target_code == kNoReturn || (distractor_enabled && distractor_code == kNoReturn)) {
    throw ConfigError("target and distractor depth codes must be nonzero");
  }
  const auto shapes = target_shapes.empty() ? shape_library(n_classes) : target_shapes;
  if (static_cast<int>(shapes.size()) != n_classes) {
    throw ConfigError("need exactly one target shape per class");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& s = shapes[i];
    if (s.width <= 0 || s.height <= 0 || s.count() == 0) throw ConfigError("target shapes must be nonempty");
    if (s.width > width || s.height > height) {
      throw ConfigError("silhouette " + std::to_string(i) + " is larger than the grid");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (shapes[j] == s) throw ConfigError("target shapes must be distinct across classes");
    }
  }
  if (distractor_enabled) {
    const Mask d = distractor.cells.empty() ? default_distractor() : distractor;
    if (distractor_x < 0 || distractor_y < 0 || distractor_x + d.width > width ||
        distractor_y + d.height > height) {
      throw ConfigError("distractor does not fit in the grid");
    }
  }
}

DepthFrame compose_frame(const SynthConfig& config, const Mask& target, double start_x,
                         double start_y, double speed, int k) {
  DepthFrame frame(config.width, config.height);
  if (config.distractor_enabled) {
    const Mask d = config.distractor.cells.empty() ? default_distractor() : config.distractor;
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        if (d.at(x, y)) frame.at(config.distractor_x + x, config.distractor_y + y) = config.distractor_code;
      }
    }
  }
  double dx = 0.0;
  double dy = 0.0;
  switch (config.direction) {
    case Direction::kDown: dy = 1.0; break;
    case Direction::kUp: dy = -1.0; break;
    case Direction::kRight: dx = 1.0; break;
    case Direction::kLeft: dx = -1.0; break;
  }
  const int ox = static_cast<int>(std::floor(start_x + dx * speed * k));
  const int oy = static_cast<int>(std::floor(start_y + dy * speed * k));
  for (int y = 0; y < target.height; ++y) {
    for (int x = 0; x < target.width; ++x) {
      const int gx = ox + x;
      const int gy = oy + y;
      if (target.at(x, y) && gx >= 0 && gy >= 0 && gx < config.width && gy < config.height) {
        frame.at(gx, gy) = config.target_code;
      }
    }
  }
  return frame;
}

namespace {

Recording generate_one(const SynthConfig& config, const Mask& shape, int class_id, int index) {
  std::mt19937_64 rng(derive_seed(config.seed, {static_cast<std::uint64_t>(class_id),
                                                static_cast<std::uint64_t>(index)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double speed = config.speed * (1.0 + config.speed_jitter * (2.0 * unit(rng) - 1.0));
  const bool vertical = config.direction == Direction::kDown || config.direction == Direction::kUp;
  // Cross-axis offset keeps the silhouette inside the grid; the along-axis
  // start is just outside the entry edge with a random phase, or anywhere
  // fully inside the grid.
  const int cross_span = vertical ? config.width - shape.width : config.height - shape.height;
  const double cross = std::floor(unit(rng) * (cross_span + 1));
  const double phase = unit(rng) * 6.0;
  double sx = 0.0;
  double sy = 0.0;
  const int along_span = vertical ? config.height - shape.height : config.width - shape.width;
  const double along = std::floor(unit(rng) * (along_span + 1));
  switch (config.direction) {
    case Direction::kDown: sx = cross; sy = -shape.height + phase; break;
    case Direction::kUp: sx = cross; sy = config.height - phase; break;
    case Direction::kRight: sx = -shape.width + phase; sy = cross; break;
    case Direction::kLeft: sx = config.width - phase; sy = cross; break;
  }
  if (config.start_inside) (vertical ? sy : sx) = along;

  std::normal_distribution<double> jitter(0.0, config.timing_jitter_sigma > 0 ? config.timing_jitter_sigma : 1.0);
  std::uniform_int_distribution<int> random_code(1, 65535);

  Recording rec;
  rec.pulse_period = config.pulse_period;
  rec.class_id = class_id;
  std::ostringstream id;
  id << "c" << class_id << "_r" << index;
  rec.recording_id = id.str();
  rec.frames.reserve(static_cast<std::size_t>(config.frames_per_recording));
  for (int k = 0; k < config.frames_per_recording; ++k) {
    DepthFrame frame = compose_frame(config, shape, sx, sy, speed, k);
    for (auto& code : frame.depth_codes) {
      if (code == kNoReturn) {
        if (config.p_false_positive > 0 && unit(rng) < config.p_false_positive) {
          code = static_cast<std::uint16_t>(random_code(rng));
        }
      } else if (config.p_false_negative > 0 && unit(rng) < config.p_false_negative) {
        code = kNoReturn;
      } else if (config.timing_jitter_sigma > 0) {
        const double v = std::round(static_cast<double>(code) + jitter(rng));
        code = static_cast<std::uint16_t>(std::clamp(v, 1.0, 65535.0));
      }
    }
    rec.frames.push_back(std::move(frame));
  }
  return rec;
}

}  // namespace

SynthDataset synth_generate(const SynthConfig& config, int jobs) {
  config.validate();
  const auto shapes = config.target_shapes.empty() ? shape_library(config.n_classes) : config.target_shapes;
  SynthDataset ds;
  const std::size_t total = static_cast<std::size_t>(config.n_classes) * config.recordings_per_class;
  ds.recordings.resize(total);
  detail::parallel_for(total, jobs, [&](std::size_t i) {
    const int c = static_cast<int>(i) / config.recordings_per_class;
    const int r = static_cast<int>(i) % config.recordings_per_class;
    ds.recordings[i] = generate_one(config, shapes[static_cast<std::size_t>(c)], c, r);
  });
  ds.manifest.n_classes = config.n_classes;
  ds.manifest.width = config.width;
  ds.manifest.height = config.height;
  ds.manifest.pulse_period = config.pulse_period;
  for (const auto& rec : ds.recordings) {
    ds.manifest.entries.push_back({rec.recording_id + ".spdrec", rec.class_id, rec.recording_id});
  }
  return ds;
}

DatasetManifest write_dataset(const SynthDataset& dataset, const std::filesystem::path& dir, int jobs) {
  const auto rec_dir = dir / "recordings";
  std::filesystem::create_directories(rec_dir);
  DatasetManifest m = dataset.manifest;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    m.entries[i].path = rec_dir / (dataset.recordings[i].recording_id + ".spdrec");
  }
  detail::parallel_for(m.entries.size(), jobs,
                       [&](std::size_t i) { save_recording(dataset.recordings[i], m.entries[i].path); });
  save_manifest(m, dir / "manifest.tsv");
  return m;
}

}  // namespace spadev
