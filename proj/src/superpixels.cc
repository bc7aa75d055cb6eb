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

#include "cdseg/superpixels.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cdseg {

void FhParams::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("FhParams: k must be positive");
  if (!(sigma_fh >= 0.0)) {
    throw std::invalid_argument("FhParams: sigma_fh must be non-negative");
  }
  if (min_size < 1) throw std::invalid_argument("FhParams: min_size must be >= 1");
}

SuperpixelMap::SuperpixelMap(int width, int height, std::vector<int> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 0 || height < 0 ||
      labels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("SuperpixelMap: size mismatch");
  }
  std::vector<int> remap;
  for (int& l : labels_) {
    if (l < 0) throw std::invalid_argument("SuperpixelMap: negative label");
    if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(l + 1, -1);
    if (remap[l] < 0) remap[l] = count_++;
    l = remap[l];
  }
}

std::vector<int> SuperpixelMap::sizes() const {
  std::vector<int> out(count_, 0);
  for (int l : labels_) ++out[l];
  return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    kernel[d + radius] = std::exp(-0.5 * d * d / (sigma * sigma));
    sum += kernel[d + radius];
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), rank_(n, 0), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Returns the surviving root.
  int join(int a, int b) {
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }
  int size(int root) const { return size_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  std::vector<int> size_;
};

struct GridEdge {
  double w;
  int a;
  int b;
};

}  // namespace

ImageF gaussian_smooth(const ImageF& image, double sigma) {
  if (image.empty()) throw std::invalid_argument("gaussian_smooth: empty image");
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("gaussian_smooth: sigma must be non-negative");
  }
  if (sigma == 0.0) return image;
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = image.width(), h = image.height(), ch = image.channels();

  ImageF tmp(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int d = -radius; d <= radius; ++d) {
          const int xx = std::clamp(x + d, 0, w - 1);
          acc += kernel[d + radius] * image.at(xx, y, c);
        }
        tmp.at(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  ImageF out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int d = -radius; d <= radius; ++d) {
          const int yy = std::clamp(y + d, 0, h - 1);
          acc += kernel[d + radius] * tmp.at(x, yy, c);
        }
        out.at(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

SuperpixelMap fh_segment(const ImageF& image, const FhParams& params) {
  params.validate();
  if (image.empty()) throw std::invalid_argument("fh_segment: empty image");
  const int w = image.width(), h = image.height(), ch = image.channels();
  const int n = w * h;

  auto distance = [&](int p, int q) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) {
      const double d = static_cast<double>(image.at_index(p, c)) -
                       static_cast<double>(image.at_index(q, c));
      acc += d * d;
    }
    return std::sqrt(acc);
  };

  // Raster order of the first pixel, then direction order, fixes the
  // processing order of equal-weight edges under the stable sort.
  std::vector<GridEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * 4);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      if (x + 1 < w) edges.push_back({distance(p, p + 1), p, p + 1});
      if (y + 1 < h) edges.push_back({distance(p, p + w), p, p + w});
      if (x + 1 < w && y + 1 < h) {
        edges.push_back({distance(p, p + w + 1), p, p + w + 1});
      }
      if (x + 1 < w && y > 0) {
        edges.push_back({distance(p, p - w + 1), p, p - w + 1});
      }
    }
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const GridEdge& l, const GridEdge& r) { return l.w < r.w; });

  DisjointSets sets(n);
  // Int(C) + k/|C| per root.
  std::vector<double> threshold(n, params.k);
  for (const GridEdge& e : edges) {
    int a = sets.find(e.a);
    int b = sets.find(e.b);
    if (a == b) continue;
    if (e.w <= threshold[a] && e.w <= threshold[b]) {
      const int root = sets.join(a, b);
      threshold[root] = e.w + params.k / sets.size(root);
    }
  }
  // Small components join their cheapest neighbor.
  for (const GridEdge& e : edges) {
    int a = sets.find(e.a);
    int b = sets.find(e.b);
    if (a != b &&
        (sets.size(a) < params.min_size || sets.size(b) < params.min_size)) {
      sets.join(a, b);
    }
  }

  std::vector<int> labels(n);
  for (int p = 0; p < n; ++p) labels[p] = sets.find(p);
  return SuperpixelMap(w, h, std::move(labels));
}

SuperpixelMap segment_superpixels(const ImageF& image, const FhParams& params) {
  params.validate();
  return fh_segment(gaussian_smooth(image, params.sigma_fh), params);
}

std::vector<VertexPair> adjacency(const SuperpixelMap& sp) {
  std::vector<VertexPair> pairs;
  auto add = [&](int a, int b) {
    if (a == b) return;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int y = 0; y < sp.height(); ++y) {
    for (int x = 0; x < sp.width(); ++x) {
      if (x + 1 < sp.width()) add(sp.label(x, y), sp.label(x + 1, y));
      if (y + 1 < sp.height()) add(sp.label(x, y), sp.label(x, y + 1));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

}  // namespace cdseg
