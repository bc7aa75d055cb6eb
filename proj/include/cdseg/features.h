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

#ifndef CDSEG_FEATURES_H_
#define CDSEG_FEATURES_H_

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cdseg/graph_core.h"
#include "cdseg/image.h"
#include "cdseg/superpixels.h"

namespace cdseg {

enum class ColorSpace { kIntensity, kLab, kRgI, kHsv, kHue };

inline constexpr std::array<ColorSpace, 5> kAllColorSpaces = {
    ColorSpace::kIntensity, ColorSpace::kLab, ColorSpace::kRgI,
    ColorSpace::kHsv, ColorSpace::kHue};

// "Intensity", "Lab", "RgI", "HSV", "H".
std::string to_string(ColorSpace space);
// Case-insensitive inverse of to_string. Throws std::invalid_argument.
ColorSpace parse_color_space(std::string_view name);

struct Lab {
  double l, a, b;
};
// sRGB (8-bit) to CIE L*a*b*, D65 white.
Lab rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Converts an 8-bit RGB raster; every output channel lies in [0,255].
// Channel orders: Intensity (I), Lab (L, a, b), RgI (r, g, I), HSV (H, S, V),
// H (H).
ImageF convert_color_space(const Image8& rgb, ColorSpace space);

// Intensity-like channel of a converted raster: I, L, I, V and H.
int gradient_channel(ColorSpace space);

inline constexpr int kColorBins = 25;
inline constexpr int kGradientBins = 10;

struct FeatureVector {
  // kColorBins per channel, each channel's block sums to 1.
  std::vector<double> color;
  // Horizontal then vertical gradient histograms, each block sums to 1.
  std::vector<double> texture;
};

// Features of one superpixel. Gradients are central differences of
// `grad_channel` over the whole raster, binned on [-255, 255].
FeatureVector superpixel_features(const ImageF& channels,
                                  const SuperpixelMap& sp, int id,
                                  int grad_channel = 0);
// Same, for every superpixel in one pass.
std::vector<FeatureVector> all_superpixel_features(const ImageF& channels,
                                                   const SuperpixelMap& sp,
                                                   int grad_channel = 0);

// exp(-|dc|^2 / sigma_c^2 - |dt|^2 / sigma_t^2) without normalization.
double kernel_affinity(const FeatureVector& fi, const FeatureVector& fj,
                       double sigma_c, double sigma_t);

// Kernel on adjacent pairs, zero elsewhere, then min-max normalized over the
// non-zero entries.
AffinityGraph build_affinity(const std::vector<FeatureVector>& features,
                             const std::vector<VertexPair>& adjacency,
                             double sigma_c, double sigma_t);

struct SigmaGrid {
  std::vector<double> sigma_c = {0.1, 0.2, 0.4, 0.8};
  std::vector<double> sigma_t = {0.1, 0.2, 0.4, 0.8};

  std::size_t size() const { return sigma_c.size() * sigma_t.size(); }
  // Candidate i is (sigma_c[i / |t|], sigma_t[i % |t|]).
  std::pair<double, double> candidate(std::size_t i) const {
    return {sigma_c[i / sigma_t.size()], sigma_t[i % sigma_t.size()]};
  }
};

struct SigmaChoice {
  double sigma_c = 0.0;
  double sigma_t = 0.0;
  std::size_t index = 0;
  double score = 0.0;
};

// Index of the best score. Among tied maxima the candidate nearest (in grid
// steps) to the per-axis grid midpoint wins, then the smaller index.
std::size_t select_best_candidate(const SigmaGrid& grid,
                                  const std::vector<double>& scores);

// Evaluates `score(sigma_c, sigma_t)` on every grid candidate and applies
// select_best_candidate.
SigmaChoice best_sigma_search(
    const SigmaGrid& grid,
    const std::function<double(double, double)>& score);

}  // namespace cdseg

#endif  // CDSEG_FEATURES_H_
