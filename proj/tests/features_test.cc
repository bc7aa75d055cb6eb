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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cdseg/fixtures.h"
#include "cdseg/propagation.h"
#include "cdseg/superpixels.h"

namespace cdseg {
namespace {

Image8 solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image8 img(w, h, 3);
  for (int p = 0; p < w * h; ++p) {
    img.at_index(p, 0) = r;
    img.at_index(p, 1) = g;
    img.at_index(p, 2) = b;
  }
  return img;
}

TEST(ColorSpace, NamesRoundTrip) {
  for (ColorSpace s : kAllColorSpaces) EXPECT_EQ(parse_color_space(to_string(s)), s);
  EXPECT_THROW(parse_color_space("YCbCr"), std::invalid_argument);
}

TEST(ConvertColorSpace, Gray) {
  const Image8 gray = solid(1, 1, 128, 128, 128);
  EXPECT_NEAR(convert_color_space(gray, ColorSpace::kIntensity).at(0, 0, 0), 128.0f, 1e-3);
  EXPECT_EQ(convert_color_space(gray, ColorSpace::kHsv).at(0, 0, 1), 0.0f);
}

TEST(ConvertColorSpace, RedChromaticity) {
  const ImageF rg = convert_color_space(solid(1, 1, 255, 0, 0), ColorSpace::kRgI);
  EXPECT_FLOAT_EQ(rg.at(0, 0, 0), 255.0f);
  EXPECT_FLOAT_EQ(rg.at(0, 0, 1), 0.0f);
  const ImageF black = convert_color_space(solid(1, 1, 0, 0, 0), ColorSpace::kRgI);
  EXPECT_NEAR(black.at(0, 0, 0), 85.0f, 1e-4);
  EXPECT_NEAR(black.at(0, 0, 1), 85.0f, 1e-4);
}

TEST(ConvertColorSpace, LabOfRed) {
  // Reference values from the standard sRGB (D65) conversion.
  const Lab lab = rgb_to_lab(255, 0, 0);
  EXPECT_NEAR(lab.l, 53.24, 0.05);
  EXPECT_NEAR(lab.a, 80.09, 0.05);
  EXPECT_NEAR(lab.b, 67.20, 0.05);
  const Lab white = rgb_to_lab(255, 255, 255);
  EXPECT_NEAR(white.l, 100.0, 1e-3);
  EXPECT_NEAR(white.a, 0.0, 1e-3);
  EXPECT_NEAR(white.b, 0.0, 1e-3);
}

TEST(ConvertColorSpace, ChannelCountsAndRange) {
  std::mt19937 rng(1);
  Image8 img(8, 8, 3);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng());
  const int expected[] = {1, 3, 3, 3, 1};
  int i = 0;
  for (ColorSpace s : kAllColorSpaces) {
    const ImageF out = convert_color_space(img, s);
    EXPECT_EQ(out.channels(), expected[i++]);
    for (float v : out.data()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 255.0f);
    }
  }
}

TEST(SuperpixelFeatures, ConstantSuperpixel) {
  ImageF img(6, 6, 3);
  for (float& v : img.data()) v = 100.0f;
  const SuperpixelMap sp(6, 6, std::vector<int>(36, 0));
  const FeatureVector f = superpixel_features(img, sp, 0);
  ASSERT_EQ(f.color.size(), 3u * kColorBins);
  ASSERT_EQ(f.texture.size(), 2u * kGradientBins);
  for (int c = 0; c < 3; ++c) {
    const int bin = 100 * kColorBins / 255;
    for (int b = 0; b < kColorBins; ++b) {
      EXPECT_EQ(f.color[c * kColorBins + b], b == bin ? 1.0 : 0.0);
    }
  }
  EXPECT_EQ(f.texture[kGradientBins / 2], 1.0);
  EXPECT_EQ(f.texture[kGradientBins + kGradientBins / 2], 1.0);
}

TEST(SuperpixelFeatures, TwoValueSuperpixel) {
  ImageF img(4, 2, 1);
  for (int x = 0; x < 4; ++x) {
    img.at(x, 0, 0) = 0.0f;
    img.at(x, 1, 0) = 255.0f;
  }
  const FeatureVector f = superpixel_features(img, SuperpixelMap(4, 2, std::vector<int>(8, 0)), 0);
  EXPECT_EQ(f.color.front(), 0.5);
  EXPECT_EQ(f.color.back(), 0.5);
}

// Direct per-pixel histogrammer: bins are searched by interval, not computed.
std::vector<double> oracle_texture(const ImageF& img, const SuperpixelMap& sp, int id) {
  std::vector<double> h(2 * kGradientBins, 0.0);
  auto at = [&](int x, int y) {
    x = std::clamp(x, 0, img.width() - 1);
    y = std::clamp(y, 0, img.height() - 1);
    return static_cast<double>(img.at(x, y, 0));
  };
  auto bin = [](double g) {
    const double width = 510.0 / kGradientBins;
    for (int b = 0; b < kGradientBins; ++b) {
      if (g < -255.0 + (b + 1) * width) return b;
    }
    return kGradientBins - 1;
  };
  int count = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (sp.label(x, y) != id) continue;
      ++count;
      h[bin((at(x + 1, y) - at(x - 1, y)) / 2)] += 1;
      h[kGradientBins + bin((at(x, y + 1) - at(x, y - 1)) / 2)] += 1;
    }
  }
  for (double& v : h) v /= count;
  return h;
}

TEST(SuperpixelFeatures, CheckerboardTextureMatchesOracle) {
  ImageF img(12, 10, 1);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) img.at(x, y, 0) = ((x / 2 + y / 3) % 2) ? 230.0f : 10.0f;
  }
  std::vector<int> labels(120);
  for (int p = 0; p < 120; ++p) labels[p] = (p % 12) < 7 ? 0 : 1;
  const SuperpixelMap sp(12, 10, labels);
  for (int id = 0; id < 2; ++id) {
    const FeatureVector f = superpixel_features(img, sp, id);
    const std::vector<double> want = oracle_texture(img, sp, id);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(f.texture[i], want[i], 1e-12);
  }
  EXPECT_EQ(all_superpixel_features(img, sp)[1].texture, superpixel_features(img, sp, 1).texture);
}

TEST(SuperpixelFeatures, PixelOrderInvariant) {
  std::mt19937 rng(7);
  ImageF img(10, 1, 1);
  for (float& v : img.data()) v = static_cast<float>(rng() % 256);
  ImageF rev(10, 1, 1);
  for (int x = 0; x < 10; ++x) rev.at(x, 0, 0) = img.at(9 - x, 0, 0);
  const SuperpixelMap sp(10, 1, std::vector<int>(10, 0));
  EXPECT_EQ(superpixel_features(img, sp, 0).color, superpixel_features(rev, sp, 0).color);
}

FeatureVector hand_feature(double a, double b) {
  FeatureVector f{std::vector<double>(kColorBins, 0.0), std::vector<double>(2 * kGradientBins, 0.0)};
  f.color[0] = a;
  f.color[1] = 1.0 - a;
  f.texture[0] = b;
  f.texture[1] = 1.0 - b;
  f.texture[kGradientBins] = 1.0;
  return f;
}

TEST(BuildAffinity, MatchesScalarFormula) {
  const std::vector<FeatureVector> feats = {hand_feature(1.0, 0.5), hand_feature(0.7, 0.4),
                                            hand_feature(0.2, 0.9)};
  const double sc = 0.4, st = 0.8;
  auto raw = [&](int i, int j) {
    const double dc = 2 * std::pow(feats[i].color[0] - feats[j].color[0], 2);
    const double dt = 2 * std::pow(feats[i].texture[0] - feats[j].texture[0], 2);
    return std::exp(-dc / (sc * sc) - dt / (st * st));
  };
  const AffinityGraph full = build_affinity(feats, {{0, 1}, {1, 2}, {0, 2}}, sc, st);
  const double v01 = raw(0, 1), v12 = raw(1, 2), v02 = raw(0, 2);
  const double lo = std::min({v01, v12, v02}), hi = std::max({v01, v12, v02});
  EXPECT_NEAR(full(0, 1), (v01 - lo) / (hi - lo), 1e-12);
  EXPECT_NEAR(full(1, 2), (v12 - lo) / (hi - lo), 1e-12);
  EXPECT_NEAR(full(0, 2), (v02 - lo) / (hi - lo), 1e-12);
  EXPECT_EQ(full(2, 0), full(0, 2));

  const AffinityGraph pruned = build_affinity(feats, {{0, 1}, {1, 2}}, sc, st);
  EXPECT_EQ(pruned(0, 2), 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(pruned(i, i), 0.0);
}

TEST(BuildAffinity, IdenticalFeaturesGiveOne) {
  const FeatureVector f = hand_feature(0.3, 0.3);
  EXPECT_EQ(kernel_affinity(f, f, 0.1, 0.1), 1.0);
  EXPECT_EQ(build_affinity({f, f}, {{0, 1}}, 0.1, 0.1)(0, 1), 1.0);
  EXPECT_THROW(build_affinity({f, f}, {{0, 1}}, 0.0, 0.1), std::invalid_argument);
}

TEST(BuildAffinity, MonotoneAndScaleOrdering) {
  const FeatureVector base = hand_feature(1.0, 1.0);
  double last = 2.0;
  for (double a : {1.0, 0.9, 0.7, 0.4}) {
    const double v = kernel_affinity(base, hand_feature(a, 1.0), 0.2, 0.4);
    EXPECT_LT(v, last);
    last = v;
  }
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureVector p = hand_feature(u(rng), u(rng)), q = hand_feature(u(rng), u(rng));
    const bool before = kernel_affinity(base, p, 0.2, 0.4) < kernel_affinity(base, q, 0.2, 0.4);
    const bool after = kernel_affinity(base, p, 0.6, 1.2) < kernel_affinity(base, q, 0.6, 1.2);
    EXPECT_EQ(before, after);
  }
}

TEST(SigmaSearch, SingleCandidate) {
  const SigmaGrid grid{{0.3}, {0.7}};
  const SigmaChoice c = best_sigma_search(grid, [](double, double) { return 0.0; });
  EXPECT_EQ(c.sigma_c, 0.3);
  EXPECT_EQ(c.sigma_t, 0.7);
}

TEST(SigmaSearch, PicksHigherScore) {
  const SigmaGrid grid{{0.1, 0.8}, {0.2}};
  const SigmaChoice c =
      best_sigma_search(grid, [](double sc, double) { return sc > 0.5 ? 1.0 : 0.0; });
  EXPECT_EQ(c.sigma_c, 0.8);
  EXPECT_EQ(c.score, 1.0);
}

TEST(SigmaSearch, TiesGoToGridMidpoint) {
  const SigmaGrid grid;
  const SigmaChoice c = best_sigma_search(grid, [](double, double) { return 1.0; });
  EXPECT_EQ(c.sigma_c, 0.2);
  EXPECT_EQ(c.sigma_t, 0.2);
}

TEST(SigmaSearch, FixtureChoiceIsGridMaximum) {
  const SyntheticFixture fx = make_three_region_fixture();
  PipelineConfig cfg;
  const PreparedMap map = prepare_map(fx.image, MapSpec{ColorSpace::kLab, 300, 0.8}, cfg);
  const MapOutcome out = run_map(map, fx.scribbles, cfg);
  ASSERT_TRUE(out.ok) << out.error;
  const std::vector<VertexSet> seeds = resolve_seeds(fx.scribbles, map.superpixels);
  std::vector<ClassSegments> segs;
  double best = -1.0;
  for (std::size_t i = 0; i < map.grid.size(); ++i) {
    std::vector<ClassSegments> per_class;
    for (int c : fx.scribbles.classes_present()) {
      if (seeds[c].empty()) continue;
      per_class.push_back(propagate_class(map.affinities[i], seeds[c], c, cfg.solver));
    }
    const Assignment as = assign_labels(per_class, map.affinities[i]);
    best = std::max(best, scribble_consistency(seeds, as.labels));
  }
  EXPECT_EQ(out.sigma.score, best);
}

}  // namespace
}  // namespace cdseg
