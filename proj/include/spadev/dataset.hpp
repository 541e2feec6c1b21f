#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spadev/types.hpp"

namespace spadev {

struct ManifestEntry {
  std::filesystem::path path;
  int class_id = 0;
  std::string recording_id;

  bool operator==(const ManifestEntry&) const = default;
};

/// Line-oriented dataset index: `path<TAB>class_id<TAB>recording_id`.
/// Dataset-wide metadata travels in `# key=value` comment lines.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  int n_classes = 0;
  int width = 0;
  int height = 0;
  Micros pulse_period = kDefaultPulsePeriod;

  /// Throws ConfigError on duplicate paths or out-of-range labels.
  void validate() const;
};

/// Relative entry paths are resolved against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
/// Entry paths are written relative to the manifest directory when possible.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

std::vector<Recording> load_recordings(const DatasetManifest& manifest, int jobs = 1);

// Augmentation ---------------------------------------------------------------

enum class Rotation { k0, k90, k180, k270 };

/// Rotation is counter-clockwise in image coordinates (y down): the pixel at
/// (x, y) of a square W x W frame moves to (y, W-1-x) under k90.
DepthFrame rotate(const DepthFrame& frame, Rotation rotation);
/// Left-right mirror: (x, y) -> (W-1-x, y).
DepthFrame mirror(const DepthFrame& frame);

/// Eight-fold dihedral augmentation {0,90,180,270} x {identity, mirror},
/// applied framewise. Output order is recording-major; ids gain a suffix
/// such as "_r90m". Labels are preserved. Throws ConfigError for non-square
/// frames.
std::vector<Recording> augment(const std::vector<Recording>& recordings);

// Splitting ------------------------------------------------------------------

/// Recording-granularity random split. The training share is
/// round(n * train_fraction), clamped so both sides are nonempty when n >= 2.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double train_fraction, std::uint64_t seed);

/// Index form of `split`, shared with the evaluation harness.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

// Import ---------------------------------------------------------------------

/// Options visible to import readers. Readers that need dimensions the source
/// format does not carry take them from here.
struct ImportOptions {
  int width = 32;
  int height = 32;
  Micros pulse_period = kDefaultPulsePeriod;
};

using RecordingReader =
    std::function<Recording(const std::filesystem::path&, const ManifestEntry&, const ImportOptions&)>;

/// Registers or replaces a reader for `format`. Built in: "spdrec" (native
/// container) and "raw16" (headerless little-endian u16 frames).
void register_reader(const std::string& format, RecordingReader reader);
const RecordingReader& find_reader(const std::string& format);
std::vector<std::string> reader_formats();

}  // namespace spadev
