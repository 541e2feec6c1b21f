#include <algorithm>
#include <cmath>
#include <map>

#include "spadev/classify.hpp"
#include "spadev/dataset.hpp"
#include "spadev/error.hpp"
#include "spadev/seed.hpp"

namespace spadev {

Vote recording_vote(std::span<const int> sample_classes) {
  if (sample_classes.empty()) return {0, true};
  std::map<int, int> counts;
  for (int c : sample_classes) ++counts[c];
  Vote v;
  int best = -1;
  for (const auto& [cls, n] : counts) {  // ascending class order keeps ties low
    if (n > best) {
      best = n;
      v.class_id = cls;
    }
  }
  return v;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  if (values.empty()) return r;
  double sum = 0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0;
    for (double v : values) sq += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return r;
}

namespace {

constexpr int kChunkRows = 256;

int channels_of(std::span<const RecordingSamples> data) {
  for (const auto& r : data) {
    if (!r.regions.empty()) return r.regions.front().channels;
  }
  return 0;
}

}  // namespace

TrialResult run_trial(std::span<const RecordingSamples> data, std::span<const std::size_t> train,
                      std::span<const std::size_t> test, const PoolConfig& pool_config, double lambda,
                      int n_classes) {
  if (n_classes <= 0) throw ConfigError("n_classes must be positive");
  const int channels = channels_of(data);
  if (channels == 0) throw ConfigError("no samples available for training");
  const int width = pooled_length(channels, pool_config);

  TrialResult result;
  RidgeAccumulator acc(width, n_classes);
  Matrix u(kChunkRows, width);
  Matrix v(kChunkRows, n_classes);
  int fill = 0;
  auto flush = [&] {
    if (fill == 0) return;
    u.rows = v.rows = fill;
    u.data.resize(static_cast<std::size_t>(fill) * width);
    v.data.resize(static_cast<std::size_t>(fill) * n_classes);
    acc.add(u, v);
    u = Matrix(kChunkRows, width);
    v = Matrix(kChunkRows, n_classes);
    fill = 0;
  };
  for (auto idx : train) {
    const auto& rec = data[idx];
    if (rec.class_id < 0 || rec.class_id >= n_classes) throw RangeError("sample class outside n_classes");
    for (const auto& region : rec.regions) {
      const auto x = pool(region, pool_config);
      std::copy(x.begin(), x.end(), u.data.begin() + static_cast<std::ptrdiff_t>(fill) * width);
      v(fill, rec.class_id) = 1.0;
      if (++fill == kChunkRows) flush();
    }
  }
  flush();
  result.train_samples = acc.samples();
  if (result.train_samples == 0) throw ConfigError("training split produced no samples");
  const ClassifierWeights weights = acc.solve(lambda);

  result.confusion.assign(static_cast<std::size_t>(n_classes), std::vector<std::uint64_t>(static_cast<std::size_t>(n_classes), 0));
  std::size_t correct_samples = 0;
  std::size_t correct_recordings = 0;
  std::vector<int> predictions;
  for (auto idx : test) {
    const auto& rec = data[idx];
    predictions.clear();
    for (const auto& region : rec.regions) {
      const int p = predict(weights, pool(region, pool_config));
      predictions.push_back(p);
      ++result.confusion[static_cast<std::size_t>(rec.class_id)][static_cast<std::size_t>(p)];
      if (p == rec.class_id) ++correct_samples;
    }
    result.test_samples += rec.regions.size();
    const Vote vote = recording_vote(predictions);
    if (vote.no_sample) ++result.no_sample_recordings;
    if (vote.class_id == rec.class_id) ++correct_recordings;
  }
  result.per_frame_accuracy =
      result.test_samples ? static_cast<double>(correct_samples) / static_cast<double>(result.test_samples) : 0.0;
  result.per_recording_accuracy =
      test.empty() ? 0.0 : static_cast<double>(correct_recordings) / static_cast<double>(test.size());
  return result;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return derive_seed(seed, {0x7121A1u, static_cast<std::uint64_t>(trial)});
}

EvalReport evaluate(std::span<const RecordingSamples> data, int n_classes, const EvalOptions& options) {
  if (data.empty()) throw ConfigError("cannot evaluate an empty dataset");
  if (options.n_trials < 1) throw ConfigError("n_trials must be at least 1");
  EvalReport report;
  report.n_trials = options.n_trials;
  std::vector<double> frame_acc;
  std::vector<double> rec_acc;
  for (int t = 0; t < options.n_trials; ++t) {
    const auto seed = trial_seed(options.seed, t);
    const auto [train, test] = split_indices(data.size(), options.train_fraction, seed);
    TrialResult r = run_trial(data, train, test, options.pool, options.lambda, n_classes);
    r.seed = seed;
    frame_acc.push_back(r.per_frame_accuracy);
    rec_acc.push_back(r.per_recording_accuracy);
    report.trials.push_back(std::move(r));
  }
  report.per_frame_accuracy = mean_std(frame_acc);
  report.per_recording_accuracy = mean_std(rec_acc);
  report.confusion = report.trials.back().confusion;
  std::vector<double> counts;
  for (const auto& r : data) counts.push_back(static_cast<double>(r.regions.size()));
  report.samples_per_recording = mean_std(counts);
  return report;
}

}  // namespace spadev
