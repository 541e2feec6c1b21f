#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spadev/time_surface.hpp"
#include "spadev/types.hpp"

namespace spadev {

/// Feature extraction with adaptive selection thresholds.
///
/// Each neuron holds a unit-norm weight vector over a P x D x D binary ROI
/// and a selection threshold in cosine-distance space. The closest neuron
/// whose distance is below its threshold wins the event, moves its weights
/// toward the ROI and tightens its threshold. When no neuron is eligible all
/// thresholds widen. The two threshold rates balance neuron activation.
struct FeastParams {
  int n_neurons = 16;
  int roi_side = 5;
  int polarity_count = 4;
  Micros tau = 2000;
  double eta = 0.001;
  double delta_shrink = 0.002;
  double delta_grow = 0.004;
  double initial_threshold = 1.0;
  /// Training reads the ROI before writing the event into the surface.
  bool train_roi_includes_self = false;
  /// Inference writes the event first, so its own cell is always set.
  bool infer_roi_includes_self = true;
  std::uint64_t seed = 1;

  int feature_length() const { return polarity_count * roi_side * roi_side; }
  void validate() const;
};

struct ContinuousFeatureSet {
  int polarities = 0;
  int side = 0;
  std::vector<std::vector<double>> weights;  // each [polarity][dy][dx], unit norm
  std::vector<double> thresholds;            // cosine distance, [0, 2]
  /// Set when training saw no usable event, so the set is still its random init.
  bool untrained = false;

  int n_neurons() const { return static_cast<int>(weights.size()); }
  int length() const { return polarities * side * side; }
};

struct BinaryFeatureSet {
  int polarities = 0;
  int side = 0;
  int m = 0;
  std::vector<std::vector<std::uint8_t>> bits;  // 0/1 per weight

  int n_neurons() const { return static_cast<int>(bits.size()); }
  int length() const { return polarities * side * side; }
  bool operator==(const BinaryFeatureSet&) const = default;
};

class FeastTrainer {
 public:
  explicit FeastTrainer(const FeastParams& params);

  /// One pass over the stream with a fresh surface. May be called repeatedly
  /// to continue training over further recordings.
  void train(const EventStream& stream);

  /// Presents one nonempty binary ROI (0/1 values, length P*D*D). Returns the
  /// winning neuron, or nothing when every neuron missed.
  std::optional<int> observe(std::span<const std::uint8_t> roi_bits);

  const ContinuousFeatureSet& features() const { return features_; }
  const std::vector<std::uint64_t>& win_counts() const { return wins_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t skipped() const { return skipped_; }
  std::uint64_t observed() const { return observed_; }

  /// Largest |1 - norm| seen after any weight update.
  double max_norm_error() const { return max_norm_error_; }
  double min_threshold_seen() const { return min_threshold_; }
  double max_threshold_seen() const { return max_threshold_; }

  ContinuousFeatureSet finish() const;

 private:
  FeastParams params_;
  ContinuousFeatureSet features_;
  std::vector<std::uint64_t> wins_;
  std::uint64_t misses_ = 0;
  std::uint64_t skipped_ = 0;
  std::uint64_t observed_ = 0;
  double max_norm_error_ = 0;
  double min_threshold_ = 0;
  double max_threshold_ = 0;
  std::vector<int> active_;  // scratch: indices of set ROI bits
};

/// Random initial features: uniform weights per seed, normalized; thresholds
/// at params.initial_threshold.
ContinuousFeatureSet random_features(const FeastParams& params);

/// Single pass of FEAST over the stream. An empty stream returns the random
/// initial features with `untrained` set.
ContinuousFeatureSet feast_train(const EventStream& stream, const FeastParams& params);

/// Equal-activation binarization: per neuron the m largest-magnitude weights
/// become 1, ties resolved toward the lowest flat index.
BinaryFeatureSet binarize(const ContinuousFeatureSet& features, int m);

/// Event-driven binary convolution. Every input event yields one Feature
/// event at the same (x, y, t) whose polarity is the neuron with the highest
/// popcount(bits AND roi), ties to the lowest index.
EventStream feast_infer(const EventStream& stream, const BinaryFeatureSet& features, const FeastParams& params);

// Feature files ---------------------------------------------------------------

/// "SPDFEA01": magic[8] u16 N u16 P u16 D u16 m. m = 0 marks a continuous set
/// followed by N*P*D*D little-endian f32; m > 0 marks a binary set followed by
/// N * ceil(P*D*D / 8) bytes, LSB-first.
inline constexpr std::string_view kFeatureMagic = "SPDFEA01";

void save_features(const ContinuousFeatureSet& features, const std::filesystem::path& path);
void save_features(const BinaryFeatureSet& features, const std::filesystem::path& path);
/// Thresholds are not stored; loaded sets have them at 1.
ContinuousFeatureSet load_continuous_features(const std::filesystem::path& path);
BinaryFeatureSet load_binary_features(const std::filesystem::path& path);

}  // namespace spadev
