#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spadev/time_surface.hpp"
#include "spadev/types.hpp"

namespace spadev {

/// Multi-channel image, layout [channel][y][x].
struct ChannelImage {
  int channels = 0;
  int width = 0;
  int height = 0;
  std::vector<float> values;

  ChannelImage() = default;
  ChannelImage(int c, int w, int h) : channels(c), width(w), height(h), values(static_cast<std::size_t>(c) * w * h, 0.0f) {}

  float at(int c, int x, int y) const { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  float& at(int c, int x, int y) { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
};

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  bool operator==(const Rect&) const = default;
};

ChannelImage surface_image(const TimeSurface& surface, Micros t_now, Micros tau);
ChannelImage crop(const ChannelImage& image, const Rect& rect);

/// Bounding box of the rows and columns whose activity marginal (count of
/// nonzero cells summed over channels) reaches activity_fraction of the
/// marginal's max. An inactive image selects the full grid.
Rect select_region(const ChannelImage& image, double activity_fraction = 0.1);
Rect select_region(const TimeSurface& surface, Micros t_now, Micros tau, double activity_fraction = 0.1);

// Pooling ----------------------------------------------------------------------

enum class PoolMethod { k1D, k2D };

struct PoolConfig {
  PoolMethod method = PoolMethod::k2D;
  int L = 12;
};

std::string to_string(PoolMethod method);
PoolMethod parse_pool_method(const std::string& name);

/// Zero-order-hold index map j(i) = floor(i * source / L), the lookup table.
std::vector<int> zoh_lookup(int source_length, int L);

/// Per channel [resampled column sums (L), resampled row sums (L)],
/// channels concatenated: length channels * 2L.
std::vector<double> pool_1d(const ChannelImage& region, int L);

/// Per channel bilinear resize to L x L on a corner-aligned grid (centre
/// sample for L = 1), flattened row-major, channels concatenated.
std::vector<double> pool_2d(const ChannelImage& region, int L);

std::vector<double> pool(const ChannelImage& region, const PoolConfig& config);
int pooled_length(int channels, const PoolConfig& config);

// Sampling ---------------------------------------------------------------------

inline constexpr int kFrameSampleInterval = 8;

/// Events between classifications per stream kind (51 / 74 / 201). Feature
/// streams have no fixed cadence and return 0.
int default_event_interval(EventKind kind);

/// Frame mode: t = j * interval * period for j = 1 .. floor(frames / interval).
std::vector<Micros> sample_instants(const Recording& recording, int interval = kFrameSampleInterval);
/// Event mode: timestamps of events k, 2k, ... (1-based).
std::vector<Micros> sample_instants(const EventStream& stream, int k);

/// Sampling interval that equalizes the total number of event-driven samples
/// with `frame_samples`; at least 1.
int normalized_event_interval(std::uint64_t total_events, std::uint64_t frame_samples);

struct SampleOptions {
  Micros tau = 2000;
  double activity_fraction = 0.1;
};

/// Region-selected surface snapshots taken after events k, 2k, ... are applied.
std::vector<ChannelImage> extract_event_samples(const EventStream& stream, int k, const SampleOptions& options);

/// Region-selected raw frames (one channel, nearer returns brighter) at every
/// interval-th frame.
std::vector<ChannelImage> extract_frame_samples(const Recording& recording, int interval, const SampleOptions& options);

// Linear classifier ------------------------------------------------------------

/// Dense row-major matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

struct ClassifierWeights {
  Matrix matrix;  // n_classes x n_inputs
  double lambda = 0.1;

  int n_classes() const { return matrix.rows; }
  int n_inputs() const { return matrix.cols; }
};

/// Streaming normal-equation accumulator for W = (U^T V)^T (U^T U + lambda I)^-1.
/// Chunks may be any size; one chunk holding all rows is the single-pass form.
class RidgeAccumulator {
 public:
  RidgeAccumulator(int n_inputs, int n_classes);
  ~RidgeAccumulator();
  RidgeAccumulator(RidgeAccumulator&&) noexcept;
  RidgeAccumulator& operator=(RidgeAccumulator&&) noexcept;

  /// Rows of U and V; throws on dimension mismatch or non-finite entries.
  void add(const Matrix& inputs, const Matrix& targets);
  /// Adds one sample with a one-hot target.
  void add_sample(std::span<const double> input, int class_id);

  std::uint64_t samples() const;
  /// lambda <= 0 with a rank-deficient Gram matrix throws SolveError.
  ClassifierWeights solve(double lambda) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ClassifierWeights train_classifier(const Matrix& inputs, const Matrix& targets, double lambda);

/// v = W u; argmax with ties to the lowest index.
int predict(const ClassifierWeights& weights, std::span<const double> input);
std::vector<double> classifier_output(const ClassifierWeights& weights, std::span<const double> input);

struct Vote {
  int class_id = 0;
  bool no_sample = false;
};

/// Modal class, ties to the lowest index; no samples gives class 0 flagged.
Vote recording_vote(std::span<const int> sample_classes);

// Evaluation -------------------------------------------------------------------

struct RecordingSamples {
  int class_id = 0;
  std::vector<ChannelImage> regions;
};

struct TrialResult {
  std::uint64_t seed = 0;
  double per_frame_accuracy = 0;
  double per_recording_accuracy = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t no_sample_recordings = 0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted], per sample
};

TrialResult run_trial(std::span<const RecordingSamples> data, std::span<const std::size_t> train,
                      std::span<const std::size_t> test, const PoolConfig& pool, double lambda, int n_classes);

struct MeanStd {
  double mean = 0;
  double std = 0;
};

MeanStd mean_std(std::span<const double> values);

struct EvalOptions {
  PoolConfig pool;
  double lambda = 0.1;
  int n_trials = 20;
  double train_fraction = 0.9;
  std::uint64_t seed = 1;
};

struct EvalReport {
  MeanStd per_frame_accuracy;
  MeanStd per_recording_accuracy;
  int n_trials = 0;
  std::vector<TrialResult> trials;
  std::vector<std::vector<std::uint64_t>> confusion;  // last trial
  MeanStd samples_per_recording;
  struct DataRateSummary {
    double frame_bytes = 0;
    double event_bytes = 0;
    double fold_reduction = 0;
  };
  std::optional<DataRateSummary> data_rate;
};

/// Seed for the split of trial `trial` under base seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

EvalReport evaluate(std::span<const RecordingSamples> data, int n_classes, const EvalOptions& options);

}  // namespace spadev
