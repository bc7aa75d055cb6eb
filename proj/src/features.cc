/* Copyright 2026 The cdseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cdseg/features.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdseg {

std::string to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::kIntensity: return "Intensity";
    case ColorSpace::kLab: return "Lab";
    case ColorSpace::kRgI: return "RgI";
    case ColorSpace::kHsv: return "HSV";
    case ColorSpace::kHue: return "H";
  }
  return "?";
}

ColorSpace parse_color_space(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (ColorSpace s : kAllColorSpaces) {
    std::string candidate = to_string(s);
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (candidate == lower) return s;
  }
  throw std::invalid_argument("unknown color space '" + std::string(name) + "'");
}

namespace {

double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                      : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

float clamp255(double v) { return static_cast<float>(std::clamp(v, 0.0, 255.0)); }

struct Hsv {
  double h;  // degrees [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 255]
};

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  Hsv out{0.0, mx > 0.0 ? d / mx : 0.0, mx};
  if (d > 0.0) {
    double h;
    if (mx == r) {
      h = std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
      h = (b - r) / d + 2.0;
    } else {
      h = (r - g) / d + 4.0;
    }
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    out.h = h;
  }
  return out;
}

int channel_count(ColorSpace space) {
  switch (space) {
    case ColorSpace::kIntensity:
    case ColorSpace::kHue:
      return 1;
    default:
      return 3;
  }
}

int color_bin(double v) {
  return std::clamp(static_cast<int>(std::floor(v * kColorBins / 255.0)), 0,
                    kColorBins - 1);
}

int gradient_bin(double g) {
  return std::clamp(
      static_cast<int>(std::floor((g + 255.0) * kGradientBins / 510.0)), 0,
      kGradientBins - 1);
}

void normalize_blocks(std::vector<double>& h, int block) {
  for (std::size_t start = 0; start < h.size(); start += block) {
    double sum = 0.0;
    for (int i = 0; i < block; ++i) sum += h[start + i];
    if (sum > 0.0) {
      for (int i = 0; i < block; ++i) h[start + i] /= sum;
    }
  }
}

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Adds pixel p of `channels` to the histograms in `f`.
void accumulate_pixel(const ImageF& channels, int x, int y, int gc,
                      FeatureVector& f) {
  const int w = channels.width(), h = channels.height();
  for (int c = 0; c < channels.channels(); ++c) {
    f.color[c * kColorBins + color_bin(channels.at(x, y, c))] += 1.0;
  }
  const double gx = 0.5 * (static_cast<double>(channels.at(std::min(x + 1, w - 1), y, gc)) -
                           channels.at(std::max(x - 1, 0), y, gc));
  const double gy = 0.5 * (static_cast<double>(channels.at(x, std::min(y + 1, h - 1), gc)) -
                           channels.at(x, std::max(y - 1, 0), gc));
  f.texture[gradient_bin(gx)] += 1.0;
  f.texture[kGradientBins + gradient_bin(gy)] += 1.0;
}

FeatureVector empty_feature(int channels) {
  return {std::vector<double>(static_cast<std::size_t>(channels) * kColorBins, 0.0),
          std::vector<double>(2 * kGradientBins, 0.0)};
}

void finish(FeatureVector& f) {
  normalize_blocks(f.color, kColorBins);
  normalize_blocks(f.texture, kGradientBins);
}

}  // namespace

Lab rgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = srgb_to_linear(r8), g = srgb_to_linear(g8),
               b = srgb_to_linear(b8);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / 0.95047), fy = lab_f(y / 1.0),
               fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

int gradient_channel(ColorSpace space) {
  switch (space) {
    case ColorSpace::kRgI:
    case ColorSpace::kHsv:
      return 2;
    default:
      return 0;
  }
}

ImageF convert_color_space(const Image8& rgb, ColorSpace space) {
  if (rgb.channels() != 3) {
    throw std::invalid_argument("convert_color_space: expected 3-channel RGB");
  }
  const int w = rgb.width(), h = rgb.height();
  ImageF out(w, h, channel_count(space));
  for (int p = 0; p < w * h; ++p) {
    const std::uint8_t r8 = rgb.at_index(p, 0), g8 = rgb.at_index(p, 1),
                       b8 = rgb.at_index(p, 2);
    const double r = r8, g = g8, b = b8;
    const double intensity = 0.299 * r + 0.587 * g + 0.114 * b;
    switch (space) {
      case ColorSpace::kIntensity:
        out.at_index(p) = clamp255(intensity);
        break;
      case ColorSpace::kLab: {
        const Lab lab = rgb_to_lab(r8, g8, b8);
        out.at_index(p, 0) = clamp255(lab.l * 2.55);
        out.at_index(p, 1) = clamp255(lab.a + 128.0);
        out.at_index(p, 2) = clamp255(lab.b + 128.0);
        break;
      }
      case ColorSpace::kRgI: {
        const double sum = r + g + b;
        const double rn = sum > 0.0 ? r / sum : 1.0 / 3.0;
        const double gn = sum > 0.0 ? g / sum : 1.0 / 3.0;
        out.at_index(p, 0) = clamp255(rn * 255.0);
        out.at_index(p, 1) = clamp255(gn * 255.0);
        out.at_index(p, 2) = clamp255(intensity);
        break;
      }
      case ColorSpace::kHsv: {
        const Hsv hsv = rgb_to_hsv(r, g, b);
        out.at_index(p, 0) = clamp255(hsv.h * 255.0 / 360.0);
        out.at_index(p, 1) = clamp255(hsv.s * 255.0);
        out.at_index(p, 2) = clamp255(hsv.v);
        break;
      }
      case ColorSpace::kHue:
        out.at_index(p) = clamp255(rgb_to_hsv(r, g, b).h * 255.0 / 360.0);
        break;
    }
  }
  return out;
}

FeatureVector superpixel_features(const ImageF& channels,
                                  const SuperpixelMap& sp, int id,
                                  int grad_channel) {
  if (id < 0 || id >= sp.count()) {
    throw std::out_of_range("superpixel_features: id out of range");
  }
  if (channels.width() != sp.width() || channels.height() != sp.height()) {
    throw std::invalid_argument("superpixel_features: size mismatch");
  }
  if (grad_channel < 0 || grad_channel >= channels.channels()) {
    throw std::out_of_range("superpixel_features: gradient channel");
  }
  FeatureVector f = empty_feature(channels.channels());
  for (int y = 0; y < sp.height(); ++y) {
    for (int x = 0; x < sp.width(); ++x) {
      if (sp.label(x, y) == id) accumulate_pixel(channels, x, y, grad_channel, f);
    }
  }
  finish(f);
  return f;
}

std::vector<FeatureVector> all_superpixel_features(const ImageF& channels,
                                                   const SuperpixelMap& sp,
                                                   int grad_channel) {
  if (channels.width() != sp.width() || channels.height() != sp.height()) {
    throw std::invalid_argument("all_superpixel_features: size mismatch");
  }
  if (grad_channel < 0 || grad_channel >= channels.channels()) {
    throw std::out_of_range("all_superpixel_features: gradient channel");
  }
  std::vector<FeatureVector> out(sp.count(), empty_feature(channels.channels()));
  for (int y = 0; y < sp.height(); ++y) {
    for (int x = 0; x < sp.width(); ++x) {
      accumulate_pixel(channels, x, y, grad_channel, out[sp.label(x, y)]);
    }
  }
  for (auto& f : out) finish(f);
  return out;
}

double kernel_affinity(const FeatureVector& fi, const FeatureVector& fj,
                       double sigma_c, double sigma_t) {
  return std::exp(-squared_distance(fi.color, fj.color) / (sigma_c * sigma_c) -
                  squared_distance(fi.texture, fj.texture) / (sigma_t * sigma_t));
}

AffinityGraph build_affinity(const std::vector<FeatureVector>& features,
                             const std::vector<VertexPair>& adjacency,
                             double sigma_c, double sigma_t) {
  if (!(sigma_c > 0.0) || !(sigma_t > 0.0)) {
    throw std::invalid_argument("build_affinity: sigmas must be positive");
  }
  const int n = static_cast<int>(features.size());
  Matrix a(n);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [i, j] : adjacency) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::out_of_range("build_affinity: adjacency id out of range");
    }
    if (i == j) continue;
    const double v = kernel_affinity(features[i], features[j], sigma_c, sigma_t);
    a(i, j) = a(j, i) = v;
    if (v > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double& v = a(i, j);
      if (v == 0.0) continue;
      v = hi > lo ? (v - lo) / (hi - lo) : 1.0;
    }
  }
  return AffinityGraph(std::move(a), adjacency);
}

std::size_t select_best_candidate(const SigmaGrid& grid,
                                  const std::vector<double>& scores) {
  if (scores.empty() || scores.size() != grid.size()) {
    throw std::invalid_argument("select_best_candidate: score count mismatch");
  }
  const double best = *std::max_element(scores.begin(), scores.end());
  const long mid_c = (static_cast<long>(grid.sigma_c.size()) - 1) / 2;
  const long mid_t = (static_cast<long>(grid.sigma_t.size()) - 1) / 2;
  const long nt = static_cast<long>(grid.sigma_t.size());
  std::size_t chosen = scores.size();
  long chosen_distance = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] != best) continue;
    const long ic = static_cast<long>(i) / nt, it = static_cast<long>(i) % nt;
    const long distance = std::abs(ic - mid_c) + std::abs(it - mid_t);
    if (chosen == scores.size() || distance < chosen_distance) {
      chosen = i;
      chosen_distance = distance;
    }
  }
  return chosen;
}

SigmaChoice best_sigma_search(
    const SigmaGrid& grid,
    const std::function<double(double, double)>& score) {
  if (grid.size() == 0) {
    throw std::invalid_argument("best_sigma_search: empty candidate grid");
  }
  std::vector<double> scores(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [sc, st] = grid.candidate(i);
    scores[i] = score(sc, st);
  }
  const std::size_t idx = select_best_candidate(grid, scores);
  const auto [sc, st] = grid.candidate(idx);
  return {sc, st, idx, scores[idx]};
}

}  // namespace cdseg
