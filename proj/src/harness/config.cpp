#include "spadev/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "spadev/error.hpp"

namespace spadev {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"seed", "1", "base seed for every random stream"},
      {"jobs", "1", "worker threads; results do not depend on it"},
      {"out", "out", "output directory"},
      {"manifest", "", "dataset manifest (path<TAB>class_id<TAB>recording_id)"},
      // synthetic data
      {"n_classes", "5", "synthetic classes"},
      {"recordings_per_class", "40", "synthetic recordings per class"},
      {"frames_per_recording", "100", "laser pulses per synthetic recording"},
      {"width", "32", "grid width (synthetic and raw16 import)"},
      {"height", "32", "grid height (synthetic and raw16 import)"},
      {"pulse_period", "10", "microseconds between laser pulses"},
      {"shapes", "", "shape-library index per class (empty = the first n_classes)"},
      {"target_code", "1000", "depth code of the moving target"},
      {"speed", "0.45", "target speed in pixels per pulse"},
      {"speed_jitter", "0.2", "relative per-recording speed jitter"},
      {"direction", "down", "target motion: down, up, left, right"},
      {"start_inside", "false", "target starts inside the grid instead of entering from the edge"},
      {"distractor", "true", "draw the static far distractor"},
      {"distractor_code", "3000", "depth code of the distractor"},
      {"p_false_positive", "0.0001", "per pixel-pulse spurious return probability"},
      {"p_false_negative", "0.02", "per pixel-pulse missed return probability"},
      {"timing_jitter_sigma", "0.4", "Gaussian depth-code jitter of true returns"},
      {"augment", "false", "apply the 8-fold rotation/mirror augmentation"},
      {"import_input", "", "manifest of source files for `import`"},
      {"import_format", "spdrec", "reader used by `import`"},
      // event generation
      {"kind", "oobu", "sources: frames, firstand, onoff, oobu (list)"},
      {"phi", "6", "First-AND event threshold"},
      {"fifo_capacity", "0", "First-AND events per pulse before drops (0 = unlimited)"},
      {"theta", "2", "On/Off depth-change threshold"},
      {"on_is_increase", "true", "On polarity marks an increasing depth code"},
      {"phi1", "2", "uni-polar count threshold"},
      {"phi2", "1", "bi-polar count threshold"},
      // features
      {"features", "none", "feature layer: none, random, trained (list)"},
      {"n_neurons", "16", "feature neurons (list)"},
      {"roi_side", "5", "ROI side D"},
      {"tau", "2000", "time-surface window in microseconds"},
      {"eta", "0.001", "FEAST weight mixing rate"},
      {"delta_shrink", "0.002", "FEAST threshold contraction per win"},
      {"delta_grow", "0.004", "FEAST threshold expansion per miss"},
      {"m", "32", "active weights per binarized neuron"},
      {"retrain_per_trial", "false", "retrain features on every trial's split"},
      // classification
      {"pool", "2d", "pooling methods: 1d, 2d (list)"},
      {"L", "12", "pool sizes (list)"},
      {"lambda", "0.1", "ridge regularization"},
      {"n_trials", "20", "random splits per configuration"},
      {"train_fraction", "0.9", "training share of each split"},
      {"activity_fraction", "0.1", "region selection threshold relative to the marginal peak"},
      {"frame_interval", "8", "pulses between frame classifications"},
      {"interval_firstand", "51", "events between First-AND classifications"},
      {"interval_onoff", "74", "events between On-Off classifications"},
      {"interval_oobu", "201", "events between OOBU classifications"},
      {"interval_feature", "0", "events between feature classifications (0 = parent's)"},
      {"cadence", "fixed", "fixed intervals, or normalized to match the frame sample count"},
      // reports
      {"demo_classes", "0,1,2", "three classes for demo-ratio"},
      {"svg", "true", "write SVG line charts next to sweep CSVs"},
  };
  return keys;
}

Config::Config() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

bool Config::is_known(const std::string& key) const { return values_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

void Config::load_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_text(ss.str());
}

std::string Config::to_text() const {
  std::ostringstream out;
  for (const auto& k : config_keys()) out << k.name << " = " << values_.at(k.name) << '\n';
  return out.str();
}

int Config::get_int(const std::string& key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    const int r = std::stoi(v, &used);
    if (used == v.size()) return r;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() != '-') {
      const auto r = std::stoull(v, &used);
      if (used == v.size()) return r;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects an unsigned integer, got '" + v + "'");
}

double Config::get_double(const std::string& key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    const double r = std::stod(v, &used);
    if (used == v.size()) return r;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
}

bool Config::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& s : get_list(key)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a list of integers, got '" + s + "'");
    }
  }
  return out;
}

std::string to_string(Source source) {
  switch (source) {
    case Source::kFrames: return "frames";
    case Source::kFirstAnd: return "firstand";
    case Source::kOnOff: return "onoff";
    case Source::kOobu: return "oobu";
  }
  return "unknown";
}

Source parse_source(const std::string& name) {
  if (name == "frames") return Source::kFrames;
  switch (parse_event_kind(name)) {
    case EventKind::kFirstAnd: return Source::kFirstAnd;
    case EventKind::kOnOff: return Source::kOnOff;
    case EventKind::kOobu: return Source::kOobu;
    case EventKind::kFeature: break;
  }
  throw ConfigError("'feature' is not a sample source; use the features key");
}

std::optional<EventKind> event_kind_of(Source source) {
  switch (source) {
    case Source::kFrames: return std::nullopt;
    case Source::kFirstAnd: return EventKind::kFirstAnd;
    case Source::kOnOff: return EventKind::kOnOff;
    case Source::kOobu: return EventKind::kOobu;
  }
  return std::nullopt;
}

std::string to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kNone: return "none";
    case FeatureMode::kRandom: return "random";
    case FeatureMode::kTrained: return "trained";
  }
  return "unknown";
}

FeatureMode parse_feature_mode(const std::string& name) {
  if (name == "none" || name == "raw") return FeatureMode::kNone;
  if (name == "random") return FeatureMode::kRandom;
  if (name == "trained") return FeatureMode::kTrained;
  throw ConfigError("unknown feature mode '" + name + "'");
}

namespace {
template <typename T>
void require_nonempty(const std::vector<T>& v, const char* key) {
  if (v.empty()) throw ConfigError(std::string("'") + key + "' must list at least one value");
}

std::uint16_t code_value(const Config& c, const std::string& key) {
  const int v = c.get_int(key);
  if (v < 1 || v > 65535) throw ConfigError("'" + key + "' must lie in [1, 65535]");
  return static_cast<std::uint16_t>(v);
}
}  // namespace

ExperimentConfig resolve(const Config& c) {
  ExperimentConfig x;
  x.seed = c.get_u64("seed");
  x.jobs = c.get_int("jobs");
  if (x.jobs < 1) throw ConfigError("jobs must be at least 1");
  x.out = c.get("out");
  x.manifest = c.get("manifest");

  auto& s = x.synth;
  s.n_classes = c.get_int("n_classes");
  s.recordings_per_class = c.get_int("recordings_per_class");
  s.frames_per_recording = c.get_int("frames_per_recording");
  s.width = c.get_int("width");
  s.height = c.get_int("height");
  s.pulse_period = c.get_int("pulse_period");
  if (const auto shapes = c.get_int_list("shapes"); !shapes.empty()) {
    const int top = *std::max_element(shapes.begin(), shapes.end());
    const auto library = shape_library(top + 1);
    for (int i : shapes) {
      if (i < 0) throw ConfigError("shape indices must be non-negative");
      s.target_shapes.push_back(library[static_cast<std::size_t>(i)]);
    }
  }
  s.target_code = code_value(c, "target_code");
  s.speed = c.get_double("speed");
  s.speed_jitter = c.get_double("speed_jitter");
  s.direction = parse_direction(c.get("direction"));
  s.start_inside = c.get_bool("start_inside");
  s.distractor_enabled = c.get_bool("distractor");
  s.distractor_code = code_value(c, "distractor_code");
  s.p_false_positive = c.get_double("p_false_positive");
  s.p_false_negative = c.get_double("p_false_negative");
  s.timing_jitter_sigma = c.get_double("timing_jitter_sigma");
  s.seed = x.seed;
  x.augment = c.get_bool("augment");
  x.import_input = c.get("import_input");
  x.import_format = c.get("import_format");

  for (const auto& k : c.get_list("kind")) x.sources.push_back(parse_source(k));
  require_nonempty(x.sources, "kind");
  x.firstand.phi = c.get_int("phi");
  if (const int cap = c.get_int("fifo_capacity"); cap > 0) x.firstand.fifo_capacity_per_pulse = static_cast<std::size_t>(cap);
  else if (cap < 0) throw ConfigError("fifo_capacity must be >= 0");
  x.firstand.validate();
  x.oobu.onoff.theta = c.get_int("theta");
  x.oobu.onoff.on_is_increase = c.get_bool("on_is_increase");
  x.oobu.phi1 = c.get_int("phi1");
  x.oobu.phi2 = c.get_int("phi2");
  x.oobu.validate();

  for (const auto& f : c.get_list("features")) x.feature_modes.push_back(parse_feature_mode(f));
  require_nonempty(x.feature_modes, "features");
  x.neuron_counts = c.get_int_list("n_neurons");
  require_nonempty(x.neuron_counts, "n_neurons");
  for (int n : x.neuron_counts) {
    if (n < 1) throw ConfigError("n_neurons entries must be positive");
  }
  x.feast.roi_side = c.get_int("roi_side");
  x.feast.tau = c.get_int("tau");
  x.feast.eta = c.get_double("eta");
  x.feast.delta_shrink = c.get_double("delta_shrink");
  x.feast.delta_grow = c.get_double("delta_grow");
  x.feast.n_neurons = x.neuron_counts.front();
  x.feast.seed = x.seed;
  x.feast.validate();
  x.m = c.get_int("m");
  if (x.m < 1) throw ConfigError("m must be at least 1");
  x.retrain_per_trial = c.get_bool("retrain_per_trial");

  for (const auto& p : c.get_list("pool")) x.pool_methods.push_back(parse_pool_method(p));
  require_nonempty(x.pool_methods, "pool");
  x.pool_sizes = c.get_int_list("L");
  require_nonempty(x.pool_sizes, "L");
  for (int l : x.pool_sizes) {
    if (l < 1) throw ConfigError("L entries must be at least 1");
  }
  x.lambda = c.get_double("lambda");
  x.n_trials = c.get_int("n_trials");
  if (x.n_trials < 1) throw ConfigError("n_trials must be at least 1");
  x.train_fraction = c.get_double("train_fraction");
  if (!(x.train_fraction > 0 && x.train_fraction < 1)) throw ConfigError("train_fraction must lie in (0, 1)");
  x.sampling.tau = x.feast.tau;
  x.sampling.activity_fraction = c.get_double("activity_fraction");
  if (!(x.sampling.activity_fraction >= 0 && x.sampling.activity_fraction <= 1)) {
    throw ConfigError("activity_fraction must lie in [0, 1]");
  }
  x.frame_interval = c.get_int("frame_interval");
  x.event_intervals[EventKind::kFirstAnd] = c.get_int("interval_firstand");
  x.event_intervals[EventKind::kOnOff] = c.get_int("interval_onoff");
  x.event_intervals[EventKind::kOobu] = c.get_int("interval_oobu");
  x.event_intervals[EventKind::kFeature] = c.get_int("interval_feature");
  if (x.frame_interval < 1) throw ConfigError("frame_interval must be at least 1");
  for (const auto& [kind, k] : x.event_intervals) {
    if (k < (kind == EventKind::kFeature ? 0 : 1)) throw ConfigError("event intervals must be positive");
  }
  const auto cadence = c.get("cadence");
  if (cadence == "fixed") x.cadence = Cadence::kFixed;
  else if (cadence == "normalized") x.cadence = Cadence::kNormalized;
  else throw ConfigError("cadence must be 'fixed' or 'normalized'");

  x.demo_classes = c.get_int_list("demo_classes");
  x.svg = c.get_bool("svg");
  return x;
}

}  // namespace spadev
