#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "spadev/commands.hpp"
#include "spadev/config.hpp"
#include "spadev/dataset.hpp"
#include "spadev/error.hpp"
#include "spadev/stream_io.hpp"
#include "spadev/synth.hpp"
#include "test_util.hpp"

using namespace spadev;
namespace fs = std::filesystem;

namespace {

Config small_config(const fs::path& out) {
  Config c;
  c.set("out", out.string());
  c.set("n_classes", "3");
  c.set("recordings_per_class", "4");
  c.set("frames_per_recording", "40");
  c.set("n_trials", "2");
  c.set("train_fraction", "0.75");
  c.set("frame_interval", "4");
  c.set("interval_firstand", "10");
  c.set("interval_onoff", "10");
  c.set("interval_oobu", "10");
  return c;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::vector<fs::path> siblings_with_prefix(const fs::path& target) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(target.parent_path()))
    if (e.path().filename().string().rfind(target.filename().string() + ".tmp", 0) == 0) out.push_back(e.path());
  return out;
}

}  // namespace

TEST_CASE("config defaults, overrides and parsing") {
  Config c;
  CHECK(c.get("seed") == "1");
  CHECK(c.get_double("lambda") == doctest::Approx(0.1));
  CHECK(c.get_int_list("L") == std::vector<int>{12});
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.get("no_such_key"), ConfigError);

  c.load_text("# comment\n  L = 1, 2 ,12  \nkind=firstand,oobu # trailing\n\nlambda = 0.5\n");
  CHECK(c.get_int_list("L") == std::vector<int>{1, 2, 12});
  CHECK(c.get_list("kind") == std::vector<std::string>{"firstand", "oobu"});
  CHECK(c.get_double("lambda") == doctest::Approx(0.5));
  CHECK_THROWS_AS(c.load_text("just words\n"), ConfigError);
  CHECK_THROWS_AS(c.load_text("bogus = 3\n"), ConfigError);

  c.set("n_trials", "abc");
  CHECK_THROWS_AS(c.get_int("n_trials"), ConfigError);
  c.set("svg", "maybe");
  CHECK_THROWS_AS(c.get_bool("svg"), ConfigError);

  Config round;
  round.set("seed", "42");
  Config back;
  back.load_text(round.to_text());
  CHECK(back.values() == round.values());

  for (const auto& k : config_keys()) CHECK(Config().get(k.name) == k.default_value);
}

TEST_CASE("config resolution") {
  Config c;
  c.set("kind", "frames,firstand,onoff,oobu");
  c.set("features", "raw,random,trained");
  c.set("pool", "1d,2d");
  const auto r = resolve(c);
  CHECK(r.sources.size() == 4u);
  CHECK(r.feature_modes == std::vector<FeatureMode>{FeatureMode::kNone, FeatureMode::kRandom, FeatureMode::kTrained});
  CHECK(r.event_intervals.at(EventKind::kOobu) == 201);
  CHECK(r.synth.n_classes == 5);
  CHECK(r.firstand.phi == 6);
  CHECK(r.oobu.phi1 == 2);
  CHECK(r.oobu.phi2 == 1);
  CHECK(r.feast.tau == 2000);
  CHECK(r.sampling.tau == r.feast.tau);

  Config bad;
  bad.set("kind", "sonar");
  CHECK_THROWS_AS(resolve(bad), ConfigError);
  bad = Config{};
  bad.set("L", "");
  CHECK_THROWS_AS(resolve(bad), ConfigError);
  bad = Config{};
  bad.set("shapes", "0,0");
  bad.set("n_classes", "2");
  CHECK_THROWS_AS(synth_generate(resolve(bad).synth), ConfigError);
}

TEST_CASE("synth command writes a reproducible dataset") {
  testutil::TempDir dir;
  auto c = small_config(dir / "a");
  const auto res = run_command("synth", c);
  CHECK(res.out == dir / "a");
  const auto m = load_manifest(dir / "a/manifest.tsv");
  CHECK(m.entries.size() == 12u);
  for (const auto& e : m.entries) CHECK(fs::exists(e.path));

  const auto run = nlohmann::json::parse(testutil::read_file(dir / "a/run.json"));
  CHECK(run["command"] == "synth");
  CHECK(run["config"]["recordings_per_class"] == "4");
  CHECK(run["seeds"]["base"] == 1);

  c.set("out", (dir / "b").string());
  run_command("synth", c, nullptr);
  for (const auto& e : fs::directory_iterator(dir / "a/recordings")) {
    CHECK(testutil::read_file(e.path()) == testutil::read_file(dir / "b/recordings" / e.path().filename()));
  }
  CHECK(testutil::read_file(dir / "a/manifest.tsv") == testutil::read_file(dir / "b/manifest.tsv"));
}

TEST_CASE("failed runs leave no output behind") {
  testutil::TempDir dir;
  auto c = small_config(dir / "bad");
  c.set("recordings_per_class", "0");
  CHECK_THROWS_AS(run_command("synth", c), ConfigError);
  CHECK_FALSE(fs::exists(dir / "bad"));
  CHECK(siblings_with_prefix(dir / "bad").empty());
  CHECK_THROWS_AS(run_command("frobnicate", small_config(dir / "x")), ConfigError);
}

TEST_CASE("convert writes one stream per recording and a data-rate table") {
  testutil::TempDir dir;
  auto c = small_config(dir / "ds");
  run_command("synth", c);
  auto conv = small_config(dir / "conv");
  conv.set("manifest", (dir / "ds/manifest.tsv").string());
  conv.set("kind", "firstand,oobu");
  run_command("convert", conv);
  for (const std::string kind : {"firstand", "oobu"}) {
    const auto csv = testutil::read_file(dir / "conv" / ("datarate_" + kind + ".csv"));
    CHECK(line_count(csv) == 13u);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "conv/streams" / kind)) {
      ++files;
      CHECK(is_well_formed(load_stream(e.path(), 10)));
    }
    CHECK(files == 12u);
  }
}

TEST_CASE("static noiseless scene yields no on-off events") {
  testutil::TempDir dir;
  auto c = small_config(dir / "static");
  c.set("speed", "0");
  c.set("speed_jitter", "0");
  c.set("start_inside", "true");
  c.set("p_false_positive", "0");
  c.set("p_false_negative", "0");
  c.set("timing_jitter_sigma", "0");
  c.set("kind", "onoff");
  run_command("convert", c);
  for (const auto& e : fs::directory_iterator(dir / "static/streams/onoff")) CHECK(load_stream(e.path(), 10).events.empty());
}

TEST_CASE("sweep cardinality and jobs independence") {
  testutil::TempDir dir;
  auto c = small_config(dir / "s1");
  c.set("kind", "frames,oobu");
  c.set("features", "none,random,trained");
  c.set("n_neurons", "2,3");
  c.set("L", "1,3");
  c.set("pool", "1d,2d");
  c.set("svg", "true");
  run_command("sweep", c);
  // frames: raw only; oobu: raw + 2 random + 2 trained.
  const std::size_t expected = (1 + 5) * 2 * 2 * 2;
  const auto csv = testutil::read_file(dir / "s1/sweep.csv");
  CHECK(line_count(csv) == expected + 1);
  CHECK(csv.rfind("kind,features,N,L,method,trial,seed,per_frame,per_recording\n", 0) == 0);
  CHECK(line_count(testutil::read_file(dir / "s1/summary.csv")) == expected / 2 + 1);
  CHECK(fs::exists(dir / "s1/accuracy_vs_L.svg"));
  CHECK(fs::exists(dir / "s1/accuracy_vs_N.svg"));
  const auto j = nlohmann::json::parse(testutil::read_file(dir / "s1/sweep.json"));
  CHECK(j.contains("feature_layers"));

  c.set("out", (dir / "s2").string());
  c.set("jobs", "3");
  run_command("sweep", c);
  CHECK(testutil::read_file(dir / "s2/sweep.csv") == csv);
  CHECK(testutil::read_file(dir / "s2/summary.csv") == testutil::read_file(dir / "s1/summary.csv"));
}

TEST_CASE("evaluate, train-features, datarate and demo-ratio outputs") {
  testutil::TempDir dir;
  auto c = small_config(dir / "ev");
  c.set("kind", "onoff");
  run_command("evaluate", c);
  const auto trials = testutil::read_file(dir / "ev/trials.csv");
  CHECK(trials.rfind("trial,seed,per_frame_acc,per_recording_acc\n", 0) == 0);
  CHECK(line_count(trials) == 3u);
  const auto rep = nlohmann::json::parse(testutil::read_file(dir / "ev/report.json"));
  CHECK(rep["n_trials"] == 2);
  CHECK(rep.contains("per_frame_accuracy"));
  CHECK(rep.contains("data_rate"));

  auto tf = small_config(dir / "tf");
  tf.set("n_neurons", "4");
  tf.set("features", "trained");
  run_command("train-features", tf);
  CHECK(fs::exists(dir / "tf/features.spdfea"));
  CHECK(fs::exists(dir / "tf/features_binary.spdfea"));

  auto dr = small_config(dir / "dr");
  dr.set("kind", "firstand,onoff,oobu");
  const auto res = run_command("datarate", dr);
  CHECK(res.summary.find("firstand") != std::string::npos);
  CHECK(fs::exists(dir / "dr/datarate.json"));

  auto demo = small_config(dir / "demo");
  const auto d = run_command("demo-ratio", demo);
  CHECK(d.summary.find("Bi/Uni") != std::string::npos);
  CHECK(line_count(testutil::read_file(dir / "demo/ratios.csv")) == 13u);
}
