#include <algorithm>
#include <cmath>

#include "spadev/classify.hpp"
#include "spadev/error.hpp"

namespace spadev {

ChannelImage surface_image(const TimeSurface& surface, Micros t_now, Micros tau) {
  ChannelImage img(surface.polarities(), surface.width(), surface.height());
  const auto bits = surface.binary_readout(t_now, tau);
  std::copy(bits.begin(), bits.end(), img.values.begin());
  return img;
}

ChannelImage crop(const ChannelImage& image, const Rect& rect) {
  if (rect.x < 0 || rect.y < 0 || rect.width <= 0 || rect.height <= 0 ||
      rect.x + rect.width > image.width || rect.y + rect.height > image.height) {
    throw RangeError("crop rectangle outside the image");
  }
  ChannelImage out(image.channels, rect.width, rect.height);
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < rect.height; ++y) {
      for (int x = 0; x < rect.width; ++x) out.at(c, x, y) = image.at(c, rect.x + x, rect.y + y);
    }
  }
  return out;
}

namespace {

// First and last index whose marginal passes the threshold; {-1, -1} if none.
std::pair<int, int> active_span(const std::vector<int>& marginal, double fraction) {
  const int peak = *std::max_element(marginal.begin(), marginal.end());
  if (peak == 0) return {-1, -1};
  const double threshold = fraction * peak;
  int first = -1;
  int last = -1;
  for (int i = 0; i < static_cast<int>(marginal.size()); ++i) {
    if (marginal[static_cast<std::size_t>(i)] > 0 && marginal[static_cast<std::size_t>(i)] >= threshold) {
      if (first < 0) first = i;
      last = i;
    }
  }
  return {first, last};
}

}  // namespace

Rect select_region(const ChannelImage& image, double activity_fraction) {
  std::vector<int> rows(static_cast<std::size_t>(image.height), 0);
  std::vector<int> cols(static_cast<std::size_t>(image.width), 0);
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        if (image.at(c, x, y) != 0.0f) {
          ++rows[static_cast<std::size_t>(y)];
          ++cols[static_cast<std::size_t>(x)];
        }
      }
    }
  }
  const auto [y0, y1] = active_span(rows, activity_fraction);
  const auto [x0, x1] = active_span(cols, activity_fraction);
  if (y0 < 0 || x0 < 0) return {0, 0, image.width, image.height};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Rect select_region(const TimeSurface& surface, Micros t_now, Micros tau, double activity_fraction) {
  return select_region(surface_image(surface, t_now, tau), activity_fraction);
}

std::string to_string(PoolMethod method) { return method == PoolMethod::k1D ? "1d" : "2d"; }

PoolMethod parse_pool_method(const std::string& name) {
  if (name == "1d" || name == "1D") return PoolMethod::k1D;
  if (name == "2d" || name == "2D") return PoolMethod::k2D;
  throw ConfigError("unknown pooling method '" + name + "'");
}

std::vector<int> zoh_lookup(int source_length, int L) {
  std::vector<int> map(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) {
    map[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<long long>(i) * source_length / L);
  }
  return map;
}

namespace {
void check_pool_args(const ChannelImage& region, int L) {
  if (L < 1) throw ConfigError("pool size L must be at least 1");
  if (region.width <= 0 || region.height <= 0 || region.channels <= 0) {
    throw ConfigError("cannot pool an empty region");
  }
}
}  // namespace

std::vector<double> pool_1d(const ChannelImage& region, int L) {
  check_pool_args(region, L);
  const auto map_x = zoh_lookup(region.width, L);
  const auto map_y = zoh_lookup(region.height, L);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(region.channels) * 2 * L);
  std::vector<double> vx(static_cast<std::size_t>(region.width));
  std::vector<double> vy(static_cast<std::size_t>(region.height));
  for (int c = 0; c < region.channels; ++c) {
    std::fill(vx.begin(), vx.end(), 0.0);
    std::fill(vy.begin(), vy.end(), 0.0);
    for (int y = 0; y < region.height; ++y) {
      for (int x = 0; x < region.width; ++x) {
        const double v = region.at(c, x, y);
        vx[static_cast<std::size_t>(x)] += v;
        vy[static_cast<std::size_t>(y)] += v;
      }
    }
    for (int j : map_x) out.push_back(vx[static_cast<std::size_t>(j)]);
    for (int j : map_y) out.push_back(vy[static_cast<std::size_t>(j)]);
  }
  return out;
}

std::vector<double> pool_2d(const ChannelImage& region, int L) {
  check_pool_args(region, L);
  auto source_coord = [L](int i, int source) {
    if (L == 1) return 0.5 * (source - 1);
    return static_cast<double>(i) * (source - 1) / (L - 1);
  };
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(region.channels) * L * L);
  for (int c = 0; c < region.channels; ++c) {
    for (int i = 0; i < L; ++i) {
      const double v = source_coord(i, region.height);
      const int y0 = static_cast<int>(std::floor(v));
      const int y1 = std::min(y0 + 1, region.height - 1);
      const double fy = v - y0;
      for (int j = 0; j < L; ++j) {
        const double u = source_coord(j, region.width);
        const int x0 = static_cast<int>(std::floor(u));
        const int x1 = std::min(x0 + 1, region.width - 1);
        const double fx = u - x0;
        const double top = (1 - fx) * region.at(c, x0, y0) + fx * region.at(c, x1, y0);
        const double bottom = (1 - fx) * region.at(c, x0, y1) + fx * region.at(c, x1, y1);
        out.push_back((1 - fy) * top + fy * bottom);
      }
    }
  }
  return out;
}

std::vector<double> pool(const ChannelImage& region, const PoolConfig& config) {
  return config.method == PoolMethod::k1D ? pool_1d(region, config.L) : pool_2d(region, config.L);
}

int pooled_length(int channels, const PoolConfig& config) {
  return config.method == PoolMethod::k1D ? channels * 2 * config.L : channels * config.L * config.L;
}

}  // namespace spadev
