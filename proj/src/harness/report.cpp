#include "spadev/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spadev/error.hpp"

namespace spadev {

namespace fs = std::filesystem;
using nlohmann::json;

StagedOutput::StagedOutput(fs::path target) : target_(std::move(target)) {
  if (target_.empty()) throw ConfigError("output directory is empty");
  const fs::path parent = fs::absolute(target_).parent_path();
  std::error_code ec;
  fs::create_directories(parent, ec);
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, ".tmp-%08x", static_cast<unsigned>(rd()));
    fs::path candidate = parent / (fs::absolute(target_).filename().string() + suffix);
    if (fs::create_directory(candidate, ec)) {
      staging_ = std::move(candidate);
      return;
    }
  }
  throw IoError("cannot create a staging directory next to '" + target_.string() + "'");
}

StagedOutput::~StagedOutput() {
  if (committed_ || staging_.empty()) return;
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void StagedOutput::commit() {
  std::error_code ec;
  fs::create_directories(target_, ec);
  if (ec) throw IoError("cannot create '" + target_.string() + "': " + ec.message());
  for (const auto& entry : fs::directory_iterator(staging_)) {
    const fs::path dest = target_ / entry.path().filename();
    if (fs::exists(dest)) fs::remove_all(dest);
    fs::rename(entry.path(), dest, ec);
    if (ec) throw IoError("cannot move '" + entry.path().string() + "' into place: " + ec.message());
  }
  fs::remove_all(staging_, ec);
  committed_ = true;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

namespace {

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

}  // namespace

std::string eval_report_json(const EvalReport& r) {
  json j;
  j["per_frame_accuracy"] = mean_std_json(r.per_frame_accuracy);
  j["per_recording_accuracy"] = mean_std_json(r.per_recording_accuracy);
  j["n_trials"] = r.n_trials;
  j["confusion"] = r.confusion;
  j["samples_per_recording"] = mean_std_json(r.samples_per_recording);
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"seed", t.seed},
                      {"per_frame_accuracy", t.per_frame_accuracy},
                      {"per_recording_accuracy", t.per_recording_accuracy},
                      {"train_samples", t.train_samples},
                      {"test_samples", t.test_samples},
                      {"no_sample_recordings", t.no_sample_recordings}});
  }
  j["trials"] = trials;
  if (r.data_rate) {
    j["data_rate"] = {{"frame_bytes", r.data_rate->frame_bytes},
                      {"event_bytes", r.data_rate->event_bytes},
                      {"fold_reduction", r.data_rate->fold_reduction}};
  }
  return j.dump(2) + "\n";
}

std::string eval_trials_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "trial,seed,per_frame_acc,per_recording_acc\n";
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const auto& t = r.trials[i];
    out << i << ',' << t.seed << ',' << format_number(t.per_frame_accuracy) << ','
        << format_number(t.per_recording_accuracy) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "kind,features,N,L,method,trial,seed,per_frame,per_recording\n";
  for (const auto& r : result.rows) {
    out << to_string(r.source) << ',' << to_string(r.mode) << ',' << r.n_neurons << ',' << r.L << ','
        << to_string(r.method) << ',' << r.trial << ',' << r.seed << ',' << format_number(r.per_frame) << ','
        << format_number(r.per_recording) << '\n';
  }
  return out.str();
}

std::string sweep_summary_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "kind,features,N,L,method,per_frame_mean,per_frame_std,per_recording_mean,per_recording_std\n";
  for (const auto& s : result.summary) {
    const auto& [source, mode, n, L, method] = s.cell;
    out << to_string(source) << ',' << to_string(mode) << ',' << n << ',' << L << ',' << to_string(method) << ','
        << format_number(s.per_frame.mean) << ',' << format_number(s.per_frame.std) << ','
        << format_number(s.per_recording.mean) << ',' << format_number(s.per_recording.std) << '\n';
  }
  return out.str();
}

std::string sweep_json(const SweepResult& result) {
  json cells = json::array();
  for (const auto& s : result.summary) {
    const auto& [source, mode, n, L, method] = s.cell;
    cells.push_back({{"kind", to_string(source)},
                     {"features", to_string(mode)},
                     {"N", n},
                     {"L", L},
                     {"method", to_string(method)},
                     {"per_frame_accuracy", mean_std_json(s.per_frame)},
                     {"per_recording_accuracy", mean_std_json(s.per_recording)}});
  }
  json layers = json::array();
  for (std::size_t i = 0; i < result.layers.size(); ++i) {
    const auto& [source, mode, n] = result.layer_keys[i];
    const auto& l = result.layers[i];
    layers.push_back({{"kind", to_string(source)},
                      {"features", to_string(mode)},
                      {"N", n},
                      {"seed", l.params.seed},
                      {"m", l.binary.m},
                      {"win_counts", l.win_counts},
                      {"misses", l.misses},
                      {"observed", l.observed}});
  }
  return json{{"cells", cells}, {"feature_layers", layers}}.dump(2) + "\n";
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series) {
  constexpr double kW = 720, kH = 440, kLeft = 60, kRight = 200, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  double x_min = 0, x_max = 1;
  bool any = false;
  for (const auto& s : series) {
    for (double x : s.x) {
      x_min = any ? std::min(x_min, x) : x;
      x_max = any ? std::max(x_max, x) : x;
      any = true;
    }
  }
  if (x_max <= x_min) x_max = x_min + 1;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << sy(v) << "\" y2=\"" << sy(v)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\">" << format_number(v).substr(0, 3)
      << "</text>\n";
  }
  std::set<double> ticks;
  for (const auto& s : series) ticks.insert(s.x.begin(), s.x.end());
  for (double x : ticks) {
    o << "<text x=\"" << sx(x) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << x << "</text>\n";
  }
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << escape_xml(x_label)
    << "</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape_xml(y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) o << (k ? " " : "") << sx(s.x[k]) << ',' << sy(s.y[k]);
    o << "\"/>\n";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      o << "<circle cx=\"" << sx(s.x[k]) << "\" cy=\"" << sy(s.y[k]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 14.0 * static_cast<double>(i) + 8;
    o << "<line x1=\"" << kLeft + pw + 12 << "\" x2=\"" << kLeft + pw + 32 << "\" y1=\"" << ly << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string sweep_svg_vs_L(const SweepResult& result) {
  std::map<std::string, SvgSeries> by_label;
  std::vector<std::string> order;
  for (const auto& s : result.summary) {
    const auto& [source, mode, n, L, method] = s.cell;
    std::string label = to_string(source) + " " + to_string(mode);
    if (mode != FeatureMode::kNone) label += " N=" + std::to_string(n);
    label += " " + to_string(method);
    auto [it, inserted] = by_label.try_emplace(label);
    if (inserted) {
      it->second.label = label;
      order.push_back(label);
    }
    it->second.x.push_back(L);
    it->second.y.push_back(s.per_frame.mean);
  }
  std::vector<SvgSeries> series;
  for (const auto& l : order) series.push_back(by_label[l]);
  return svg_line_chart("Per-frame accuracy vs pool size", "L", "accuracy", series);
}

std::string sweep_svg_vs_N(const SweepResult& result) {
  int max_L = 0;
  for (const auto& s : result.summary) max_L = std::max(max_L, std::get<3>(s.cell));
  std::map<std::string, SvgSeries> by_label;
  std::vector<std::string> order;
  for (const auto& s : result.summary) {
    const auto& [source, mode, n, L, method] = s.cell;
    if (mode == FeatureMode::kNone || L != max_L) continue;
    const std::string label = to_string(source) + " " + to_string(mode) + " " + to_string(method);
    auto [it, inserted] = by_label.try_emplace(label);
    if (inserted) {
      it->second.label = label;
      order.push_back(label);
    }
    it->second.x.push_back(n);
    it->second.y.push_back(s.per_frame.mean);
  }
  std::vector<SvgSeries> series;
  for (const auto& l : order) series.push_back(by_label[l]);
  return svg_line_chart("Per-frame accuracy vs feature count (L=" + std::to_string(max_L) + ")", "N", "accuracy",
                        series);
}

}  // namespace spadev
