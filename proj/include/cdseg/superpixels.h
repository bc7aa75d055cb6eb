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

// Graph-based superpixels (Felzenszwalb-Huttenlocher) on an 8-connected
// pixel grid, with Gaussian pre-smoothing and superpixel adjacency.

#ifndef CDSEG_SUPERPIXELS_H_
#define CDSEG_SUPERPIXELS_H_

#include <vector>

#include "cdseg/graph_core.h"
#include "cdseg/image.h"

namespace cdseg {

struct FhParams {
  double k = 300.0;         // scale of the size-dependent merge threshold
  double sigma_fh = 0.8;    // pre-smoothing, pixels
  int min_size = 20;        // pixels

  void validate() const;
};

class SuperpixelMap {
 public:
  SuperpixelMap() = default;
  // Relabels ids to 0..count-1 in raster order of first appearance.
  SuperpixelMap(int width, int height, std::vector<int> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  int count() const { return count_; }
  int label(int x, int y) const { return labels_[y * width_ + x]; }
  int label_at(int p) const { return labels_[p]; }
  const std::vector<int>& labels() const { return labels_; }
  // Pixel count per superpixel.
  std::vector<int> sizes() const;

  bool operator==(const SuperpixelMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int count_ = 0;
  std::vector<int> labels_;
};

// Separable Gaussian blur per channel, radius ceil(3 sigma), clamped edges.
// sigma == 0 returns the input unchanged.
ImageF gaussian_smooth(const ImageF& image, double sigma);

// Segments an already smoothed raster. Edge weight is the Euclidean distance
// between pixel vectors; params.sigma_fh is not applied here.
SuperpixelMap fh_segment(const ImageF& image, const FhParams& params);

// gaussian_smooth followed by fh_segment.
SuperpixelMap segment_superpixels(const ImageF& image, const FhParams& params);

// Unordered pairs (i < j) of superpixels sharing a 4-connected pixel border,
// sorted.
std::vector<VertexPair> adjacency(const SuperpixelMap& sp);

}  // namespace cdseg

#endif  // CDSEG_SUPERPIXELS_H_
