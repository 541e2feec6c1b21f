#include "spadev/pipeline.hpp"

#include <algorithm>

#include "../core/parallel.hpp"
#include "spadev/error.hpp"
#include "spadev/seed.hpp"
#include "spadev/synth.hpp"

namespace spadev {

LoadedDataset load_dataset(const ExperimentConfig& config) {
  LoadedDataset d;
  if (!config.manifest.empty()) {
    d.manifest = load_manifest(config.manifest);
    d.recordings = load_recordings(d.manifest, config.jobs);
  } else {
    SynthDataset s = synth_generate(config.synth, config.jobs);
    d.manifest = std::move(s.manifest);
    d.recordings = std::move(s.recordings);
  }
  if (config.augment) {
    d.recordings = augment(d.recordings);
    DatasetManifest m = d.manifest;
    m.entries.clear();
    for (const auto& r : d.recordings) m.entries.push_back({r.recording_id + ".spdrec", r.class_id, r.recording_id});
    d.manifest = std::move(m);
  }
  if (d.recordings.empty()) throw ConfigError("dataset has no recordings");
  if (d.manifest.n_classes <= 0) {
    int n = 0;
    for (const auto& r : d.recordings) n = std::max(n, r.class_id + 1);
    d.manifest.n_classes = n;
  }
  return d;
}

EventStream convert(const Recording& recording, EventKind kind, const ExperimentConfig& config, FirstAndStats* stats) {
  switch (kind) {
    case EventKind::kFirstAnd: return firstand_convert(recording, GateBank::borders(), config.firstand, stats);
    case EventKind::kOnOff: return onoff_convert(recording, config.oobu.onoff);
    case EventKind::kOobu: return oobu_convert(recording, config.oobu);
    case EventKind::kFeature: break;
  }
  throw ConfigError("feature streams are produced by feast inference, not by conversion");
}

Pipeline::Pipeline(const ExperimentConfig& config, std::vector<Recording> recordings, int n_classes)
    : config_(config), recordings_(std::move(recordings)), n_classes_(n_classes) {
  if (recordings_.empty()) throw ConfigError("pipeline needs at least one recording");
  if (n_classes_ <= 0) throw ConfigError("n_classes must be positive");
  for (const auto& r : recordings_) validate(r, n_classes_);
}

const std::vector<EventStream>& Pipeline::streams(Source source) {
  auto it = streams_.find(source);
  if (it != streams_.end()) return it->second;
  const auto kind = event_kind_of(source);
  if (!kind) throw ConfigError("frames have no event stream");
  std::vector<EventStream> out(recordings_.size());
  detail::parallel_for(recordings_.size(), config_.jobs,
                       [&](std::size_t i) { out[i] = convert(recordings_[i], *kind, config_); });
  return streams_.emplace(source, std::move(out)).first->second;
}

int Pipeline::event_interval(Source source) {
  const auto kind = event_kind_of(source);
  if (!kind) return config_.frame_interval;
  if (config_.cadence == Cadence::kFixed) return config_.event_intervals.at(*kind);
  if (auto it = intervals_.find(source); it != intervals_.end()) return it->second;
  std::uint64_t events = 0;
  std::uint64_t frame_samples = 0;
  for (const auto& s : streams(source)) events += s.events.size();
  for (const auto& r : recordings_) frame_samples += r.frames.size() / static_cast<std::size_t>(config_.frame_interval);
  const int k = normalized_event_interval(events, frame_samples);
  intervals_[source] = k;
  return k;
}

int Pipeline::feature_interval(Source source) {
  const int k = config_.event_intervals.at(EventKind::kFeature);
  return k > 0 ? k : event_interval(source);
}

std::uint64_t Pipeline::feature_seed(Source source, int n_neurons) const {
  return derive_seed(config_.seed, {0xFEA57u, static_cast<std::uint64_t>(source), static_cast<std::uint64_t>(n_neurons)});
}

FeatureLayer Pipeline::features(Source source, FeatureMode mode, int n_neurons, std::span<const std::size_t> train) {
  if (mode == FeatureMode::kNone) throw ConfigError("no feature layer requested");
  const auto& s = streams(source);
  FeatureLayer layer;
  layer.mode = mode;
  layer.params = config_.feast;
  layer.params.n_neurons = n_neurons;
  layer.params.polarity_count = s.front().polarities;
  layer.params.seed = feature_seed(source, n_neurons);
  layer.params.validate();
  if (mode == FeatureMode::kRandom) {
    layer.continuous = random_features(layer.params);
  } else {
    FeastTrainer trainer(layer.params);
    for (auto idx : train) trainer.train(s.at(idx));
    layer.continuous = trainer.finish();
    layer.win_counts = trainer.win_counts();
    layer.misses = trainer.misses();
    layer.observed = trainer.observed();
  }
  layer.binary = binarize(layer.continuous, config_.m);
  return layer;
}

std::vector<RecordingSamples> Pipeline::raw_samples(Source source) {
  std::vector<RecordingSamples> out(recordings_.size());
  if (source == Source::kFrames) {
    detail::parallel_for(recordings_.size(), config_.jobs, [&](std::size_t i) {
      out[i].class_id = recordings_[i].class_id;
      out[i].regions = extract_frame_samples(recordings_[i], config_.frame_interval, config_.sampling);
    });
    return out;
  }
  const auto& s = streams(source);
  const int k = event_interval(source);
  detail::parallel_for(recordings_.size(), config_.jobs, [&](std::size_t i) {
    out[i].class_id = recordings_[i].class_id;
    out[i].regions = extract_event_samples(s[i], k, config_.sampling);
  });
  return out;
}

std::vector<RecordingSamples> Pipeline::feature_samples(Source source, const FeatureLayer& layer) {
  const auto& s = streams(source);
  const int k = feature_interval(source);
  std::vector<RecordingSamples> out(recordings_.size());
  detail::parallel_for(recordings_.size(), config_.jobs, [&](std::size_t i) {
    out[i].class_id = recordings_[i].class_id;
    out[i].regions = extract_event_samples(feast_infer(s[i], layer.binary, layer.params), k, config_.sampling);
  });
  return out;
}

std::optional<MeanStd> SweepResult::find(Source source, FeatureMode mode, int n_neurons, int L, PoolMethod method,
                                         bool per_recording) const {
  const SweepCell key{source, mode, mode == FeatureMode::kNone ? 0 : n_neurons, L, method};
  for (const auto& s : summary) {
    if (s.cell == key) return per_recording ? s.per_recording : s.per_frame;
  }
  return std::nullopt;
}

namespace {

struct CellRun {
  std::vector<std::vector<TrialResult>> results;  // [pool][trial]
  std::vector<FeatureLayer> layers;               // layer per distinct feature training
  std::vector<std::size_t> samples_per_recording;
};

CellRun run_cells(Pipeline& p, Source source, FeatureMode mode, int n_neurons, const std::vector<PoolConfig>& pools) {
  const auto& cfg = p.config();
  const std::size_t n = p.recordings().size();
  const auto trials = static_cast<std::size_t>(cfg.n_trials);
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> splits;
  for (std::size_t t = 0; t < trials; ++t) {
    splits.push_back(split_indices(n, cfg.train_fraction, trial_seed(cfg.seed, static_cast<int>(t))));
  }

  CellRun run;
  run.results.assign(pools.size(), std::vector<TrialResult>(trials));
  auto solve = [&](const std::vector<RecordingSamples>& data, std::size_t first, std::size_t last) {
    const std::size_t per = last - first;
    detail::parallel_for(pools.size() * per, cfg.jobs, [&](std::size_t task) {
      const std::size_t pi = task / per;
      const std::size_t t = first + task % per;
      TrialResult r = run_trial(data, splits[t].first, splits[t].second, pools[pi], cfg.lambda, p.n_classes());
      r.seed = trial_seed(cfg.seed, static_cast<int>(t));
      run.results[pi][t] = std::move(r);
    });
  };
  auto record_counts = [&](const std::vector<RecordingSamples>& data) {
    if (!run.samples_per_recording.empty()) return;
    for (const auto& r : data) run.samples_per_recording.push_back(r.regions.size());
  };

  if (mode == FeatureMode::kNone) {
    const auto data = p.raw_samples(source);
    record_counts(data);
    solve(data, 0, trials);
  } else if (mode == FeatureMode::kTrained && cfg.retrain_per_trial) {
    for (std::size_t t = 0; t < trials; ++t) {
      run.layers.push_back(p.features(source, mode, n_neurons, splits[t].first));
      const auto data = p.feature_samples(source, run.layers.back());
      record_counts(data);
      solve(data, t, t + 1);
    }
  } else {
    run.layers.push_back(p.features(source, mode, n_neurons, splits.front().first));
    const auto data = p.feature_samples(source, run.layers.back());
    record_counts(data);
    solve(data, 0, trials);
  }
  return run;
}

}  // namespace

SweepResult run_sweep(Pipeline& p) {
  const auto& cfg = p.config();
  std::vector<PoolConfig> pools;
  for (int L : cfg.pool_sizes) {
    for (auto method : cfg.pool_methods) pools.push_back({method, L});
  }
  SweepResult result;
  for (auto source : cfg.sources) {
    for (auto mode : cfg.feature_modes) {
      if (source == Source::kFrames && mode != FeatureMode::kNone) continue;
      const std::vector<int> ns = mode == FeatureMode::kNone ? std::vector<int>{0} : cfg.neuron_counts;
      for (int n : ns) {
        CellRun run = run_cells(p, source, mode, n, pools);
        if (!run.layers.empty()) {
          result.layers.push_back(std::move(run.layers.front()));
          result.layer_keys.emplace_back(source, mode, n);
        }
        for (std::size_t pi = 0; pi < pools.size(); ++pi) {
          std::vector<double> frame;
          std::vector<double> rec;
          for (std::size_t t = 0; t < run.results[pi].size(); ++t) {
            const auto& r = run.results[pi][t];
            result.rows.push_back({source, mode, n, pools[pi].L, pools[pi].method, static_cast<int>(t), r.seed,
                                   r.per_frame_accuracy, r.per_recording_accuracy});
            frame.push_back(r.per_frame_accuracy);
            rec.push_back(r.per_recording_accuracy);
          }
          result.summary.push_back({{source, mode, n, pools[pi].L, pools[pi].method}, mean_std(frame), mean_std(rec)});
        }
      }
    }
  }
  return result;
}

EvalReport run_evaluate(Pipeline& p) {
  const auto& cfg = p.config();
  const Source source = cfg.sources.front();
  const FeatureMode mode = cfg.feature_modes.front();
  if (source == Source::kFrames && mode != FeatureMode::kNone) {
    throw ConfigError("feature layers apply to event sources only");
  }
  const int n = mode == FeatureMode::kNone ? 0 : cfg.neuron_counts.front();
  const PoolConfig pool{cfg.pool_methods.front(), cfg.pool_sizes.front()};
  CellRun run = run_cells(p, source, mode, n, {pool});

  EvalReport report;
  report.n_trials = cfg.n_trials;
  report.trials = std::move(run.results.front());
  std::vector<double> frame;
  std::vector<double> rec;
  for (const auto& t : report.trials) {
    frame.push_back(t.per_frame_accuracy);
    rec.push_back(t.per_recording_accuracy);
  }
  report.per_frame_accuracy = mean_std(frame);
  report.per_recording_accuracy = mean_std(rec);
  report.confusion = report.trials.back().confusion;
  std::vector<double> counts(run.samples_per_recording.begin(), run.samples_per_recording.end());
  report.samples_per_recording = mean_std(counts);
  if (source != Source::kFrames) {
    const auto& streams = p.streams(source);
    EvalReport::DataRateSummary d;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      const DataRate r = datarate_stats(p.recordings()[i], streams[i]);
      d.frame_bytes += static_cast<double>(r.frame_bytes);
      d.event_bytes += static_cast<double>(r.event_bytes);
      d.fold_reduction += r.fold_reduction;
    }
    const auto count = static_cast<double>(streams.size());
    d.frame_bytes /= count;
    d.event_bytes /= count;
    d.fold_reduction /= count;
    report.data_rate = d;
  }
  return report;
}

}  // namespace spadev
