#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spadev/classify.hpp"
#include "spadev/eventgen.hpp"
#include "spadev/feast.hpp"
#include "spadev/synth.hpp"

namespace spadev {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every recognised key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Flat `key = value` configuration. List values are comma separated. Unknown
/// keys are rejected so typos surface immediately.
class Config {
 public:
  Config();

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool is_known(const std::string& key) const;

  /// Reads `key = value` lines; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text);

  std::string to_text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Source of classifier samples: raw frames or one of the event kinds.
enum class Source { kFrames, kFirstAnd, kOnOff, kOobu };
std::string to_string(Source source);
Source parse_source(const std::string& name);
std::optional<EventKind> event_kind_of(Source source);

enum class FeatureMode { kNone, kRandom, kTrained };
std::string to_string(FeatureMode mode);
FeatureMode parse_feature_mode(const std::string& name);

enum class Cadence { kFixed, kNormalized };

/// Fully resolved experiment description; everything downstream reads this.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::filesystem::path out = "out";

  std::filesystem::path manifest;
  SynthConfig synth;
  bool augment = false;
  std::filesystem::path import_input;
  std::string import_format = "spdrec";

  std::vector<Source> sources;
  FirstAndParams firstand;
  OobuParams oobu;
  FeastParams feast;  // n_neurons / polarity_count / seed are filled per run
  std::vector<int> neuron_counts;
  int m = 32;
  std::vector<FeatureMode> feature_modes;
  bool retrain_per_trial = false;

  std::vector<PoolMethod> pool_methods;
  std::vector<int> pool_sizes;
  double lambda = 0.1;
  int n_trials = 20;
  double train_fraction = 0.9;
  SampleOptions sampling;
  int frame_interval = kFrameSampleInterval;
  std::map<EventKind, int> event_intervals;  // 0 for Feature means "parent's interval"
  Cadence cadence = Cadence::kFixed;

  std::vector<int> demo_classes;
  bool svg = true;
};

ExperimentConfig resolve(const Config& config);

}  // namespace spadev
