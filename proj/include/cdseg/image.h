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

#ifndef CDSEG_IMAGE_H_
#define CDSEG_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cdseg {

// Interleaved row-major raster with `channels` values per pixel.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw std::invalid_argument("Raster: invalid dimensions");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }
  Raster(int width, int height, int channels, std::vector<T> data)
      : width_(width), height_(height), channels_(channels),
        data_(std::move(data)) {
    if (width < 0 || height < 0 || channels < 1 ||
        data_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw std::invalid_argument("Raster: data size does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  int pixel_count() const { return width_ * height_; }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  const T& at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  // Pixel index p = y * width + x.
  T& at_index(int p, int c = 0) {
    return data_[static_cast<std::size_t>(p) * channels_ + c];
  }
  const T& at_index(int p, int c = 0) const {
    return data_[static_cast<std::size_t>(p) * channels_ + c];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Raster& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using Image8 = Raster<std::uint8_t>;
using ImageF = Raster<float>;

}  // namespace cdseg

#endif  // CDSEG_IMAGE_H_
