#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spadev/classify.hpp"
#include "spadev/pipeline.hpp"

namespace spadev {

/// Output directory that only appears once complete. Files are written into a
/// sibling staging directory; commit() moves each entry into place.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path target);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  const std::filesystem::path& staging() const { return staging_; }
  std::filesystem::path path(const std::string& name) const { return staging_ / name; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

/// Writes text atomically enough for a staging directory (plain overwrite).
void write_text(const std::filesystem::path& path, const std::string& text);

std::string eval_report_json(const EvalReport& report);
/// trial, seed, per_frame_acc, per_recording_acc
std::string eval_trials_csv(const EvalReport& report);

/// kind, features, N, L, method, trial, seed, per_frame, per_recording
std::string sweep_csv(const SweepResult& result);
/// One row per cell with means and sample standard deviations.
std::string sweep_summary_csv(const SweepResult& result);
std::string sweep_json(const SweepResult& result);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line chart; y is drawn over [0, 1].
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series);

/// Per-frame accuracy against L, one series per (kind, features, N, method).
std::string sweep_svg_vs_L(const SweepResult& result);
/// Per-frame accuracy against N at the largest L, one series per (kind, features, method).
std::string sweep_svg_vs_N(const SweepResult& result);

/// Fixed-precision formatting shared by every CSV so output is byte-stable.
std::string format_number(double value);

}  // namespace spadev
