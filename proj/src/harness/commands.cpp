#include "spadev/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "../core/parallel.hpp"
#include "spadev/error.hpp"
#include "spadev/pipeline.hpp"
#include "spadev/recording_io.hpp"
#include "spadev/report.hpp"
#include "spadev/stream_io.hpp"
#include "spadev/synth.hpp"

namespace spadev {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  std::string command;
  const Config& raw;
  ExperimentConfig config;
  StagedOutput out;
  std::ostream* log;
  json seeds = json::object();

  void note(const std::string& line) const {
    if (log) *log << line << std::endl;
  }
};

void write_run_json(Context& c) {
  json values = json::object();
  for (const auto& [k, v] : c.raw.values()) values[k] = v;
  json trial_seeds = json::array();
  for (int t = 0; t < c.config.n_trials; ++t) trial_seeds.push_back(trial_seed(c.config.seed, t));
  c.seeds["base"] = c.config.seed;
  c.seeds["trials"] = trial_seeds;
  const json run = {{"command", c.command}, {"version", kVersion}, {"config", values}, {"seeds", c.seeds}};
  write_text(c.out.path("run.json"), run.dump(2) + "\n");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

SynthDataset as_dataset(DatasetManifest manifest, std::vector<Recording> recordings) {
  SynthDataset d;
  manifest.entries.clear();
  for (const auto& r : recordings) manifest.entries.push_back({r.recording_id + ".spdrec", r.class_id, r.recording_id});
  if (!recordings.empty()) {
    manifest.width = recordings.front().width();
    manifest.height = recordings.front().height();
    manifest.pulse_period = recordings.front().pulse_period;
  }
  d.manifest = std::move(manifest);
  d.recordings = std::move(recordings);
  return d;
}

std::vector<Source> event_sources(const ExperimentConfig& cfg) {
  std::vector<Source> out;
  for (auto s : cfg.sources) {
    if (s != Source::kFrames) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("this command needs at least one event kind in 'kind'");
  return out;
}

std::string cmd_synth(Context& c) {
  SynthDataset d = synth_generate(c.config.synth, c.config.jobs);
  if (c.config.augment) d = as_dataset(d.manifest, augment(d.recordings));
  write_dataset(d, c.out.staging(), c.config.jobs);
  return "wrote " + std::to_string(d.recordings.size()) + " recordings and manifest.tsv";
}

std::string cmd_import(Context& c) {
  if (c.config.import_input.empty()) throw ConfigError("import needs import_input (a manifest of source files)");
  const DatasetManifest input = load_manifest(c.config.import_input);
  const RecordingReader& reader = find_reader(c.config.import_format);
  const ImportOptions opts{c.config.synth.width, c.config.synth.height, c.config.synth.pulse_period};
  std::vector<Recording> recs(input.entries.size());
  detail::parallel_for(recs.size(), c.config.jobs, [&](std::size_t i) {
    recs[i] = reader(input.entries[i].path, input.entries[i], opts);
    validate(recs[i]);
  });
  if (c.config.augment) recs = augment(recs);
  DatasetManifest meta = input;
  if (meta.n_classes <= 0) {
    for (const auto& r : recs) meta.n_classes = std::max(meta.n_classes, r.class_id + 1);
  }
  SynthDataset d = as_dataset(meta, std::move(recs));
  d.manifest.validate();
  write_dataset(d, c.out.staging(), c.config.jobs);
  return "imported " + std::to_string(d.recordings.size()) + " recordings (" + c.config.import_format + ")";
}

std::string cmd_convert(Context& c) {
  const LoadedDataset data = load_dataset(c.config);
  std::ostringstream summary;
  for (auto source : event_sources(c.config)) {
    const EventKind kind = *event_kind_of(source);
    const std::string name = to_string(source);
    const fs::path dir = c.out.path("streams") / name;
    fs::create_directories(dir);
    std::vector<DataRate> rates(data.recordings.size());
    std::vector<FirstAndStats> stats(data.recordings.size());
    detail::parallel_for(data.recordings.size(), c.config.jobs, [&](std::size_t i) {
      const auto& rec = data.recordings[i];
      const EventStream s = convert(rec, kind, c.config, &stats[i]);
      save_stream(s, dir / (rec.recording_id + ".spdevt"), rec.pulse_period);
      rates[i] = datarate_stats(rec, s);
    });
    std::ostringstream csv;
    csv << "recording_id,frame_bytes,event_bytes,fold\n";
    double fold = 0;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      csv << data.recordings[i].recording_id << ',' << rates[i].frame_bytes << ',' << rates[i].event_bytes << ','
          << format_number(rates[i].fold_reduction) << '\n';
      fold += rates[i].fold_reduction;
      dropped += stats[i].dropped_events;
    }
    write_text(c.out.path("datarate_" + name + ".csv"), csv.str());
    summary << name << ": " << rates.size() << " streams, mean fold " << format_number(fold / static_cast<double>(rates.size()));
    if (kind == EventKind::kFirstAnd) summary << ", dropped " << dropped;
    summary << '\n';
    c.note("converted " + name);
  }
  return summary.str();
}

std::string cmd_datarate(Context& c) {
  const LoadedDataset data = load_dataset(c.config);
  std::ostringstream csv;
  csv << "kind,recording_id,frame_bytes,event_bytes,fold\n";
  json kinds = json::object();
  std::ostringstream summary;
  for (auto source : event_sources(c.config)) {
    const EventKind kind = *event_kind_of(source);
    std::vector<DataRate> rates(data.recordings.size());
    detail::parallel_for(data.recordings.size(), c.config.jobs, [&](std::size_t i) {
      rates[i] = datarate_stats(data.recordings[i], convert(data.recordings[i], kind, c.config));
    });
    double frame = 0, event = 0, fold = 0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      csv << to_string(source) << ',' << data.recordings[i].recording_id << ',' << rates[i].frame_bytes << ','
          << rates[i].event_bytes << ',' << format_number(rates[i].fold_reduction) << '\n';
      frame += static_cast<double>(rates[i].frame_bytes);
      event += static_cast<double>(rates[i].event_bytes);
      fold += rates[i].fold_reduction;
    }
    const auto n = static_cast<double>(rates.size());
    kinds[to_string(source)] = {{"mean_frame_bytes", frame / n},
                                {"mean_event_bytes", event / n},
                                {"mean_fold", fold / n},
                                {"aggregate_fold", frame / std::max(event, 1.0)}};
    summary << to_string(source) << ": mean fold " << format_number(fold / n) << '\n';
  }
  write_text(c.out.path("datarate.csv"), csv.str());
  write_text(c.out.path("datarate.json"), json{{"recordings", data.recordings.size()}, {"kinds", kinds}}.dump(2) + "\n");
  return summary.str();
}

std::string cmd_train_features(Context& c) {
  const LoadedDataset data = load_dataset(c.config);
  const Source source = event_sources(c.config).front();
  FeatureMode mode = c.config.feature_modes.front();
  if (mode == FeatureMode::kNone) mode = FeatureMode::kTrained;
  const int n = c.config.neuron_counts.front();
  Pipeline p(c.config, data.recordings, data.manifest.n_classes);
  const auto [train, test] = split_indices(data.recordings.size(), c.config.train_fraction, trial_seed(c.config.seed, 0));
  const FeatureLayer layer = p.features(source, mode, n, train);
  save_features(layer.continuous, c.out.path("features.spdfea"));
  save_features(layer.binary, c.out.path("features_binary.spdfea"));
  c.seeds["features"] = layer.params.seed;
  const json info = {{"kind", to_string(source)},
                     {"features", to_string(mode)},
                     {"N", n},
                     {"m", layer.binary.m},
                     {"polarities", layer.params.polarity_count},
                     {"roi_side", layer.params.roi_side},
                     {"seed", layer.params.seed},
                     {"training_recordings", train.size()},
                     {"untrained", layer.continuous.untrained},
                     {"thresholds", layer.continuous.thresholds},
                     {"win_counts", layer.win_counts},
                     {"misses", layer.misses},
                     {"observed", layer.observed}};
  write_text(c.out.path("features.json"), info.dump(2) + "\n");
  return "trained " + std::to_string(n) + " " + to_string(mode) + " features on " + std::to_string(train.size()) +
         " " + to_string(source) + " recordings";
}

std::string cmd_evaluate(Context& c) {
  const LoadedDataset data = load_dataset(c.config);
  Pipeline p(c.config, data.recordings, data.manifest.n_classes);
  const EvalReport r = run_evaluate(p);
  write_text(c.out.path("report.json"), eval_report_json(r));
  write_text(c.out.path("trials.csv"), eval_trials_csv(r));
  return "per-frame " + percent(r.per_frame_accuracy.mean) + "% +- " + percent(r.per_frame_accuracy.std) +
         ", per-recording " + percent(r.per_recording_accuracy.mean) + "% +- " +
         percent(r.per_recording_accuracy.std);
}

std::string cmd_sweep(Context& c) {
  const LoadedDataset data = load_dataset(c.config);
  Pipeline p(c.config, data.recordings, data.manifest.n_classes);
  const SweepResult r = run_sweep(p);
  json feature_seeds = json::array();
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& [source, mode, n] = r.layer_keys[i];
    feature_seeds.push_back({{"kind", to_string(source)}, {"features", to_string(mode)}, {"N", n}, {"seed", r.layers[i].params.seed}});
  }
  c.seeds["features"] = feature_seeds;
  write_text(c.out.path("sweep.csv"), sweep_csv(r));
  write_text(c.out.path("summary.csv"), sweep_summary_csv(r));
  write_text(c.out.path("sweep.json"), sweep_json(r));
  if (c.config.svg) {
    write_text(c.out.path("accuracy_vs_L.svg"), sweep_svg_vs_L(r));
    if (std::any_of(r.summary.begin(), r.summary.end(),
                    [](const auto& s) { return std::get<1>(s.cell) != FeatureMode::kNone; })) {
      write_text(c.out.path("accuracy_vs_N.svg"), sweep_svg_vs_N(r));
    }
  }
  return std::to_string(r.rows.size()) + " rows over " + std::to_string(r.summary.size()) + " cells";
}

std::string cmd_demo_ratio(Context& c) {
  if (c.config.demo_classes.size() != 3) throw ConfigError("demo_classes must list exactly three classes");
  std::vector<Recording> recs;
  if (c.config.manifest.empty()) {
    SynthConfig s = c.config.synth;
    const int needed = *std::max_element(c.config.demo_classes.begin(), c.config.demo_classes.end()) + 1;
    const auto library = shape_library(std::max(needed, 1));
    s.target_shapes.clear();
    for (int cls : c.config.demo_classes) {
      if (cls < 0) throw ConfigError("demo_classes must be non-negative");
      s.target_shapes.push_back(library[static_cast<std::size_t>(cls)]);
    }
    s.n_classes = 3;
    recs = synth_generate(s, c.config.jobs).recordings;
    for (auto& r : recs) r.class_id = c.config.demo_classes[static_cast<std::size_t>(r.class_id)];
  } else {
    const std::set<int> wanted(c.config.demo_classes.begin(), c.config.demo_classes.end());
    for (auto& r : load_dataset(c.config).recordings) {
      if (wanted.count(r.class_id)) recs.push_back(std::move(r));
    }
  }
  std::vector<EventStream> streams(recs.size());
  detail::parallel_for(recs.size(), c.config.jobs,
                       [&](std::size_t i) { streams[i] = oobu_convert(recs[i], c.config.oobu); });
  std::vector<int> classes;
  std::ostringstream csv;
  csv << "recording_id,class_id,on,off,bi,uni\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    classes.push_back(recs[i].class_id);
    const auto n = polarity_counts(streams[i]);
    csv << recs[i].recording_id << ',' << recs[i].class_id << ',' << n[oobu::kOn] << ',' << n[oobu::kOff] << ','
        << n[oobu::kBi] << ',' << n[oobu::kUni] << '\n';
  }
  const RatioDemoResult r = count_ratio_demo(streams, classes);
  auto split_json = [](const RatioSplit& s) {
    return json{{"accuracy", s.accuracy},
                {"low_threshold", s.low_threshold},
                {"high_threshold", s.high_threshold},
                {"interval_class", s.interval_class}};
  };
  write_text(c.out.path("ratios.csv"), csv.str());
  write_text(c.out.path("demo_ratio.json"),
             json{{"classes", c.config.demo_classes}, {"recordings", recs.size()}, {"on_off", split_json(r.onoff)},
                  {"bi_uni", split_json(r.biuni)}}
                     .dump(2) + "\n");
  return "On/Off ratio accuracy " + percent(r.onoff.accuracy) + "%, Bi/Uni ratio accuracy " +
         percent(r.biuni.accuracy) + "%";
}

const std::map<std::string, std::function<std::string(Context&)>>& handlers() {
  static const std::map<std::string, std::function<std::string(Context&)>> h = {
      {"synth", cmd_synth},       {"import", cmd_import},     {"convert", cmd_convert},
      {"train-features", cmd_train_features},                 {"sweep", cmd_sweep},
      {"evaluate", cmd_evaluate}, {"demo-ratio", cmd_demo_ratio}, {"datarate", cmd_datarate},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"synth",    "import",   "convert",    "train-features",
                                                 "sweep",    "evaluate", "demo-ratio", "datarate"};
  return names;
}

CommandResult run_command(const std::string& name, const Config& config, std::ostream* log) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw ConfigError("unknown command '" + name + "'");
  ExperimentConfig resolved = resolve(config);
  Context c{name, config, resolved, StagedOutput(resolved.out), log};
  CommandResult result;
  result.summary = it->second(c);
  write_run_json(c);
  c.out.commit();
  result.out = resolved.out;
  return result;
}

}  // namespace spadev
