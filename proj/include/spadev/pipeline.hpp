#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "spadev/classify.hpp"
#include "spadev/config.hpp"
#include "spadev/dataset.hpp"
#include "spadev/feast.hpp"

namespace spadev {

/// Recordings plus the manifest they came from. With no manifest configured
/// the synthetic generator runs in memory.
struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<Recording> recordings;
};

LoadedDataset load_dataset(const ExperimentConfig& config);

EventStream convert(const Recording& recording, EventKind kind, const ExperimentConfig& config,
                    FirstAndStats* stats = nullptr);

/// A binary feature set together with how it was produced.
struct FeatureLayer {
  FeatureMode mode = FeatureMode::kNone;
  FeastParams params;
  ContinuousFeatureSet continuous;
  BinaryFeatureSet binary;
  std::vector<std::uint64_t> win_counts;  // empty for random features
  std::uint64_t misses = 0;
  std::uint64_t observed = 0;
};

/// Shared state of one experiment: converted streams and sample sets are
/// computed once and cached. Work inside a call is spread over config.jobs
/// threads; results never depend on the thread count.
class Pipeline {
 public:
  Pipeline(const ExperimentConfig& config, std::vector<Recording> recordings, int n_classes);

  const ExperimentConfig& config() const { return config_; }
  const std::vector<Recording>& recordings() const { return recordings_; }
  int n_classes() const { return n_classes_; }

  const std::vector<EventStream>& streams(Source source);
  /// Events between classifications for the source's raw stream.
  int event_interval(Source source);
  /// Interval for the feature stream fed by `source`.
  int feature_interval(Source source);

  /// Seed shared by the random and trained feature sets of one (source, N).
  std::uint64_t feature_seed(Source source, int n_neurons) const;
  FeatureLayer features(Source source, FeatureMode mode, int n_neurons, std::span<const std::size_t> train);

  std::vector<RecordingSamples> raw_samples(Source source);
  std::vector<RecordingSamples> feature_samples(Source source, const FeatureLayer& layer);

 private:
  ExperimentConfig config_;
  std::vector<Recording> recordings_;
  int n_classes_;
  std::map<Source, std::vector<EventStream>> streams_;
  std::map<Source, int> intervals_;
};

struct SweepRow {
  Source source = Source::kOobu;
  FeatureMode mode = FeatureMode::kNone;
  int n_neurons = 0;
  int L = 0;
  PoolMethod method = PoolMethod::k2D;
  int trial = 0;
  std::uint64_t seed = 0;
  double per_frame = 0;
  double per_recording = 0;
};

/// Cell key (source, mode, N, L, method).
using SweepCell = std::tuple<Source, FeatureMode, int, int, PoolMethod>;

struct SweepSummaryRow {
  SweepCell cell;
  MeanStd per_frame;
  MeanStd per_recording;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummaryRow> summary;
  /// Features used per (source, mode, N); trained layers from the first
  /// trial's split.
  std::vector<FeatureLayer> layers;
  std::vector<std::tuple<Source, FeatureMode, int>> layer_keys;

  std::optional<MeanStd> find(Source source, FeatureMode mode, int n_neurons, int L, PoolMethod method,
                              bool per_recording = false) const;
};

/// Every source x feature mode x N x L x method x trial. Frames only run
/// without a feature layer, and N is 0 for raw rows.
SweepResult run_sweep(Pipeline& pipeline);

/// The first entry of every list key as a single evaluated configuration.
EvalReport run_evaluate(Pipeline& pipeline);

}  // namespace spadev
