#include "spadev/feast.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "../core/byteio.hpp"
#include "spadev/error.hpp"

namespace spadev {

void FeastParams::validate() const {
  if (n_neurons <= 0) throw ConfigError("n_neurons must be positive");
  if (roi_side <= 0 || roi_side % 2 == 0) throw ConfigError("roi_side must be odd and positive");
  if (polarity_count <= 0) throw ConfigError("polarity_count must be positive");
  if (tau <= 0) throw ConfigError("tau must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (!(delta_shrink > 0.0) || !(delta_grow > 0.0)) throw ConfigError("threshold rates must be positive");
  if (!(initial_threshold >= 0.0 && initial_threshold <= 2.0)) {
    throw ConfigError("initial_threshold must lie in [0, 2]");
  }
}

namespace {

void normalize(std::vector<double>& w) {
  double sq = 0;
  for (double v : w) sq += v * v;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : w) v *= inv;
}

double norm_error(const std::vector<double>& w) {
  double sq = 0;
  for (double v : w) sq += v * v;
  return std::abs(std::sqrt(sq) - 1.0);
}

std::size_t word_count(int bits) { return static_cast<std::size_t>(bits + 63) / 64; }

}  // namespace

ContinuousFeatureSet random_features(const FeastParams& params) {
  params.validate();
  ContinuousFeatureSet f;
  f.polarities = params.polarity_count;
  f.side = params.roi_side;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int len = params.feature_length();
  for (int n = 0; n < params.n_neurons; ++n) {
    std::vector<double> w(static_cast<std::size_t>(len));
    for (double& v : w) v = unit(rng);
    normalize(w);
    f.weights.push_back(std::move(w));
  }
  f.thresholds.assign(static_cast<std::size_t>(params.n_neurons), params.initial_threshold);
  return f;
}

FeastTrainer::FeastTrainer(const FeastParams& params)
    : params_(params),
      features_(random_features(params)),
      wins_(static_cast<std::size_t>(params.n_neurons), 0),
      min_threshold_(params.initial_threshold),
      max_threshold_(params.initial_threshold) {
  for (const auto& w : features_.weights) max_norm_error_ = std::max(max_norm_error_, norm_error(w));
}

std::optional<int> FeastTrainer::observe(std::span<const std::uint8_t> roi_bits) {
  if (static_cast<int>(roi_bits.size()) != features_.length()) {
    throw ConfigError("ROI length does not match the feature length");
  }
  active_.clear();
  for (std::size_t i = 0; i < roi_bits.size(); ++i) {
    if (roi_bits[i]) active_.push_back(static_cast<int>(i));
  }
  if (active_.empty()) {
    ++skipped_;
    return std::nullopt;
  }
  ++observed_;
  const double roi_value = 1.0 / std::sqrt(static_cast<double>(active_.size()));

  int winner = -1;
  double best = 0;
  for (int n = 0; n < features_.n_neurons(); ++n) {
    const auto& w = features_.weights[static_cast<std::size_t>(n)];
    double dot = 0;
    for (int i : active_) dot += w[static_cast<std::size_t>(i)];
    const double dist = 1.0 - dot * roi_value;
    if (dist < features_.thresholds[static_cast<std::size_t>(n)] && (winner < 0 || dist < best)) {
      winner = n;
      best = dist;
    }
  }

  if (winner < 0) {
    ++misses_;
    for (double& th : features_.thresholds) {
      th = std::min(th + params_.delta_grow, 2.0);
      max_threshold_ = std::max(max_threshold_, th);
    }
    return std::nullopt;
  }

  auto& w = features_.weights[static_cast<std::size_t>(winner)];
  const double keep = 1.0 - params_.eta;
  for (double& v : w) v *= keep;
  for (int i : active_) w[static_cast<std::size_t>(i)] += params_.eta * roi_value;
  normalize(w);
  max_norm_error_ = std::max(max_norm_error_, norm_error(w));

  double& th = features_.thresholds[static_cast<std::size_t>(winner)];
  th = std::max(th - params_.delta_shrink, 0.0);
  min_threshold_ = std::min(min_threshold_, th);
  ++wins_[static_cast<std::size_t>(winner)];
  return winner;
}

void FeastTrainer::train(const EventStream& stream) {
  if (stream.polarities != params_.polarity_count) {
    throw ConfigError("stream has " + std::to_string(stream.polarities) + " polarities, FEAST expects " +
                      std::to_string(params_.polarity_count));
  }
  if (stream.events.empty()) return;
  TimeSurface surface(stream.grid_width, stream.grid_height, stream.polarities);
  const int len = params_.feature_length();
  std::vector<std::uint64_t> words(word_count(len));
  std::vector<std::uint8_t> roi(static_cast<std::size_t>(len));
  for (const auto& e : stream.events) {
    if (params_.train_roi_includes_self) surface.update(e);
    read_binary_roi_packed(surface, e.x, e.y, params_.roi_side, e.t, params_.tau, words.data());
    for (int i = 0; i < len; ++i) roi[static_cast<std::size_t>(i)] = (words[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1u;
    if (!params_.train_roi_includes_self) surface.update(e);
    observe(roi);
  }
}

ContinuousFeatureSet FeastTrainer::finish() const {
  ContinuousFeatureSet f = features_;
  f.untrained = observed_ == 0;
  return f;
}

ContinuousFeatureSet feast_train(const EventStream& stream, const FeastParams& params) {
  FeastTrainer trainer(params);
  trainer.train(stream);
  return trainer.finish();
}

BinaryFeatureSet binarize(const ContinuousFeatureSet& features, int m) {
  const int len = features.length();
  if (m < 1 || m > len) {
    throw ConfigError("m must lie in [1, " + std::to_string(len) + "], got " + std::to_string(m));
  }
  BinaryFeatureSet out;
  out.polarities = features.polarities;
  out.side = features.side;
  out.m = m;
  std::vector<int> order(static_cast<std::size_t>(len));
  for (const auto& w : features.weights) {
    if (static_cast<int>(w.size()) != len) throw ConfigError("feature weight length mismatch");
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(w[static_cast<std::size_t>(a)]) > std::abs(w[static_cast<std::size_t>(b)]);
    });
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(len), 0);
    for (int i = 0; i < m; ++i) bits[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    out.bits.push_back(std::move(bits));
  }
  return out;
}

EventStream feast_infer(const EventStream& stream, const BinaryFeatureSet& features, const FeastParams& params) {
  if (features.length() != params.feature_length() || features.polarities != stream.polarities) {
    throw ConfigError("binary feature length does not match P*D*D of the stream");
  }
  if (features.n_neurons() == 0) throw ConfigError("empty feature set");
  const int len = features.length();
  const std::size_t words = word_count(len);
  std::vector<std::uint64_t> packed(words * static_cast<std::size_t>(features.n_neurons()), 0);
  for (int n = 0; n < features.n_neurons(); ++n) {
    for (int i = 0; i < len; ++i) {
      if (features.bits[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)]) {
        packed[static_cast<std::size_t>(n) * words + static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
  }

  EventStream out;
  out.kind = EventKind::kFeature;
  out.grid_width = stream.grid_width;
  out.grid_height = stream.grid_height;
  out.polarities = features.n_neurons();
  out.events.reserve(stream.events.size());
  if (stream.events.empty()) return out;

  TimeSurface surface(stream.grid_width, stream.grid_height, stream.polarities);
  std::vector<std::uint64_t> roi(words);
  for (const auto& e : stream.events) {
    if (params.infer_roi_includes_self) surface.update(e);
    read_binary_roi_packed(surface, e.x, e.y, params.roi_side, e.t, params.tau, roi.data());
    if (!params.infer_roi_includes_self) surface.update(e);
    int winner = 0;
    int best = -1;
    for (int n = 0; n < features.n_neurons(); ++n) {
      int score = 0;
      const std::uint64_t* f = &packed[static_cast<std::size_t>(n) * words];
      for (std::size_t w = 0; w < words; ++w) score += std::popcount(f[w] & roi[w]);
      if (score > best) {
        best = score;
        winner = n;
      }
    }
    out.events.push_back({e.x, e.y, e.t, static_cast<std::uint16_t>(winner)});
  }
  // Several input events can share (t, y, x); restore the polarity tiebreak.
  std::stable_sort(out.events.begin(), out.events.end(), event_order);
  return out;
}

// Feature files ---------------------------------------------------------------

namespace {

void write_header(detail::ByteWriter& out, int n, int p, int d, int m) {
  if (n > 0xFFFF || p > 0xFFFF || d > 0xFFFF || m > 0xFFFF) {
    throw ParseError(ErrorCode::kDimensionOverflow, "feature set dimensions exceed 16 bits");
  }
  out.bytes(kFeatureMagic);
  out.u16(static_cast<std::uint16_t>(n));
  out.u16(static_cast<std::uint16_t>(p));
  out.u16(static_cast<std::uint16_t>(d));
  out.u16(static_cast<std::uint16_t>(m));
}

struct Header {
  int n, p, d, m;
};

Header read_header(detail::ByteReader& in) {
  if (!in.has(kFeatureMagic.size()) || in.bytes(kFeatureMagic.size()) != kFeatureMagic) {
    throw ParseError(ErrorCode::kBadMagic, "not an SPDFEA01 feature file (bad magic)");
  }
  Header h{in.u16(), in.u16(), in.u16(), in.u16()};
  return h;
}

void check_exact(const detail::ByteReader& in, std::uint64_t expected) {
  if (in.remaining() < expected) throw ParseError(ErrorCode::kTruncated, "feature payload truncated");
  if (in.remaining() > expected) throw ParseError(ErrorCode::kDimensionOverflow, "feature file has trailing bytes");
}

}  // namespace

void save_features(const ContinuousFeatureSet& features, const std::filesystem::path& path) {
  detail::ByteWriter out;
  write_header(out, features.n_neurons(), features.polarities, features.side, 0);
  for (const auto& w : features.weights) {
    for (double v : w) out.f32(static_cast<float>(v));
  }
  detail::write_file(path, out.data());
}

void save_features(const BinaryFeatureSet& features, const std::filesystem::path& path) {
  if (features.m <= 0) throw ConfigError("binary feature set needs m > 0");
  detail::ByteWriter out;
  write_header(out, features.n_neurons(), features.polarities, features.side, features.m);
  const std::size_t bytes = static_cast<std::size_t>(features.length() + 7) / 8;
  for (const auto& b : features.bits) {
    for (std::size_t j = 0; j < bytes; ++j) {
      std::uint8_t v = 0;
      for (std::size_t k = 0; k < 8 && j * 8 + k < b.size(); ++k) {
        if (b[j * 8 + k]) v |= static_cast<std::uint8_t>(1u << k);
      }
      out.u8(v);
    }
  }
  detail::write_file(path, out.data());
}

ContinuousFeatureSet load_continuous_features(const std::filesystem::path& path) {
  const auto data = detail::read_file(path);
  detail::ByteReader in(data);
  const Header h = read_header(in);
  if (h.m != 0) throw ConfigError("'" + path.string() + "' holds a binary feature set");
  const std::uint64_t len = std::uint64_t(h.p) * h.d * h.d;
  check_exact(in, std::uint64_t(h.n) * len * 4);
  ContinuousFeatureSet f;
  f.polarities = h.p;
  f.side = h.d;
  for (int n = 0; n < h.n; ++n) {
    std::vector<double> w(len);
    for (double& v : w) v = in.f32();
    f.weights.push_back(std::move(w));
  }
  f.thresholds.assign(static_cast<std::size_t>(h.n), 1.0);
  return f;
}

BinaryFeatureSet load_binary_features(const std::filesystem::path& path) {
  const auto data = detail::read_file(path);
  detail::ByteReader in(data);
  const Header h = read_header(in);
  if (h.m == 0) throw ConfigError("'" + path.string() + "' holds a continuous feature set");
  const std::size_t len = std::size_t(h.p) * h.d * h.d;
  const std::size_t bytes = (len + 7) / 8;
  check_exact(in, std::uint64_t(h.n) * bytes);
  BinaryFeatureSet f;
  f.polarities = h.p;
  f.side = h.d;
  f.m = h.m;
  for (int n = 0; n < h.n; ++n) {
    std::vector<std::uint8_t> bits(len, 0);
    for (std::size_t j = 0; j < bytes; ++j) {
      const auto v = in.u8();
      for (std::size_t k = 0; k < 8 && j * 8 + k < len; ++k) bits[j * 8 + k] = (v >> k) & 1u;
    }
    f.bits.push_back(std::move(bits));
  }
  return f;
}

}  // namespace spadev
