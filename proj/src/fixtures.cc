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

#include "cdseg/fixtures.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace cdseg {

namespace {

constexpr std::array<std::array<int, 3>, 3> kRegionColors = {{
    {30, 40, 150},   // background
    {210, 60, 40},   // disc
    {170, 220, 60},  // rectangle
}};

}  // namespace

SyntheticFixture make_three_region_fixture(std::uint32_t seed, int size,
                                           double noise) {
  SyntheticFixture fx;
  const double s = size / 96.0;
  const double cx = 64 * s, cy = 30 * s, radius = 20 * s;
  const int rx0 = static_cast<int>(10 * s), rx1 = static_cast<int>(46 * s);
  const int ry0 = static_cast<int>(56 * s), ry1 = static_cast<int>(88 * s);

  std::vector<std::uint8_t> gt(static_cast<std::size_t>(size) * size, 0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      std::uint8_t c = 0;
      if (std::hypot(x - cx, y - cy) <= radius) c = 1;
      if (x >= rx0 && x < rx1 && y >= ry0 && y < ry1) c = 2;
      gt[static_cast<std::size_t>(y) * size + x] = c;
    }
  }
  fx.ground_truth = LabelMask(size, size, gt);

  std::mt19937 rng(seed);
  const int amplitude = static_cast<int>(std::lround(noise * 255.0));
  std::uniform_int_distribution<int> jitter(-amplitude, amplitude);
  fx.image = Image8(size, size, 3);
  for (int p = 0; p < size * size; ++p) {
    for (int c = 0; c < 3; ++c) {
      const int v = kRegionColors[gt[p]][c] + jitter(rng);
      fx.image.at_index(p, c) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }

  fx.strokes.width = size;
  fx.strokes.height = size;
  fx.strokes.strokes = {
      {0, 3.0, {{8 * s, 10 * s}, {30 * s, 10 * s}}},
      {1, 3.0, {{56 * s, 30 * s}, {72 * s, 30 * s}}},
      {2, 3.0, {{18 * s, 72 * s}, {38 * s, 72 * s}}},
  };
  fx.scribbles = rasterize_strokes(fx.strokes);
  return fx;
}

Image8 make_two_half_image(int width, int height) {
  Image8 img(width, height, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = width / 2; x < width; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 255;
    }
  }
  return img;
}

}  // namespace cdseg
