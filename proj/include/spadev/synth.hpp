#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spadev/dataset.hpp"
#include "spadev/types.hpp"

namespace spadev {

/// Binary silhouette, row-major.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  bool at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t count() const;
  bool operator==(const Mask&) const = default;
};

/// Parses rows of '#'/'.' (or '1'/'0') into a mask.
Mask mask_from_rows(const std::vector<std::string>& rows);

/// The first n built-in silhouettes. The first fifteen are hand-designed with
/// a deliberate spread of edge density (solid blocks, one-pixel combs,
/// outlines); later indices are compact random blobs seeded by index.
std::vector<Mask> shape_library(int n);

enum class Direction { kDown, kUp, kLeft, kRight };
Direction parse_direction(const std::string& name);

struct SynthConfig {
  int n_classes = 5;
  int recordings_per_class = 40;
  int frames_per_recording = 100;
  int width = 32;
  int height = 32;
  Micros pulse_period = kDefaultPulsePeriod;

  /// One silhouette per class; empty selects shape_library(n_classes).
  std::vector<Mask> target_shapes;
  std::uint16_t target_code = 1000;
  double speed = 0.45;        // pixels per frame
  double speed_jitter = 0.2;  // relative, uniform in [-j, +j] per recording
  Direction direction = Direction::kDown;
  /// Edge: the target enters from outside the grid. Inside: it starts at a
  /// random position fully inside the grid.
  bool start_inside = false;

  bool distractor_enabled = true;
  Mask distractor;  // empty selects a 10x6 block
  int distractor_x = 19;
  int distractor_y = 3;
  std::uint16_t distractor_code = 3000;

  double p_false_positive = 0.0001;
  double p_false_negative = 0.02;
  double timing_jitter_sigma = 0.4;

  std::uint64_t seed = 1;

  /// Throws ConfigError on invalid probabilities, sizes or duplicate shapes.
  void validate() const;
};

struct SynthDataset {
  DatasetManifest manifest;  // entry paths are bare file names until written
  std::vector<Recording> recordings;
};

/// Deterministic given the seed, regardless of `jobs`.
SynthDataset synth_generate(const SynthConfig& config, int jobs = 1);

/// Noise-free composite of frame `k` for a recording whose target starts at
/// (start_x, start_y) and moves at `speed`; exposed for tests.
DepthFrame compose_frame(const SynthConfig& config, const Mask& target, double start_x,
                         double start_y, double speed, int k);

/// Writes `<dir>/recordings/<id>.spdrec` plus `<dir>/manifest.tsv`; returns
/// the manifest with absolute paths.
DatasetManifest write_dataset(const SynthDataset& dataset, const std::filesystem::path& dir, int jobs = 1);

}  // namespace spadev
