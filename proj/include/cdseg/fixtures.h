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

#ifndef CDSEG_FIXTURES_H_
#define CDSEG_FIXTURES_H_

#include <cstdint>

#include "cdseg/image.h"
#include "cdseg/io.h"
#include "cdseg/propagation.h"

namespace cdseg {

struct SyntheticFixture {
  Image8 image;
  LabelMask ground_truth;
  StrokeDocument strokes;
  ScribbleSet scribbles;  // rasterized strokes
};

// Three flat-colored regions (background, disc, rectangle) with uniform
// per-channel noise of +-noise*255 and one stroke per region. Deterministic
// for a given seed.
SyntheticFixture make_three_region_fixture(std::uint32_t seed = 7,
                                           int size = 96, double noise = 0.10);

// Left half black, right half white.
Image8 make_two_half_image(int width, int height);

}  // namespace cdseg

#endif  // CDSEG_FIXTURES_H_
