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

// File formats: PNG/PPM rasters, scribble annotations, label masks and the
// key-value pipeline configuration.

#ifndef CDSEG_IO_H_
#define CDSEG_IO_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cdseg/config.h"
#include "cdseg/image.h"
#include "cdseg/propagation.h"

namespace cdseg {

// Unsupported format, corrupt data or unreadable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes);

// PNG (any bit depth/color type, converted) or binary PPM (P6) to 8-bit RGB.
Image8 decode_image(const std::vector<std::uint8_t>& bytes);
Image8 load_image(const std::filesystem::path& path);

// PNG of an 8-bit raster with 1 (gray) or 3 (RGB) channels.
std::vector<std::uint8_t> encode_png(const Image8& image);
// Decodes a PNG keeping 8-bit gray as one channel; other types become RGB.
Image8 decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_ppm(const Image8& rgb);
void save_png(const Image8& image, const std::filesystem::path& path);

// Value 255 marks unlabeled pixels in scribble PNGs.
inline constexpr int kScribbleUnlabeled = 255;

struct Stroke {
  int class_id = 0;
  double width_px = 1.0;
  std::vector<std::pair<double, double>> polyline;  // (x, y) pixel centers
};

struct StrokeDocument {
  int width = 0;
  int height = 0;
  std::vector<Stroke> strokes;
};

// {"width": W, "height": H,
//  "strokes": [{"class_id": c, "width_px": w, "polyline": [[x, y], ...]}]}
StrokeDocument parse_strokes(std::string_view json_text);
std::string format_strokes(const StrokeDocument& doc);

// Pixel (x, y) is covered when its distance to the polyline is at most
// width_px / 2 (round caps and joins). Later strokes overwrite earlier ones.
ScribbleSet rasterize_strokes(const StrokeDocument& doc);

// Single-channel scribble PNG: values < n_cl are class ids, 255 is
// unlabeled. Throws std::invalid_argument on other values or no strokes.
ScribbleSet scribbles_from_png(const Image8& gray, int n_cl);
ScribbleSet decode_scribbles(const std::vector<std::uint8_t>& bytes, int n_cl);
// Accepts a scribble PNG or a stroke JSON document.
ScribbleSet load_scribbles(const std::filesystem::path& path, int n_cl);
Image8 scribbles_to_png_raster(const ScribbleSet& scr);

void save_mask(const LabelMask& mask, const std::filesystem::path& path);
LabelMask load_mask(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_mask(const LabelMask& mask);
LabelMask decode_mask(const std::vector<std::uint8_t>& bytes);

// Flat "key = value" lines; '#' starts a comment. Keys not mentioned keep
// their defaults. Throws std::invalid_argument on unknown keys or bad values.
PipelineConfig parse_config(std::string_view text,
                            PipelineConfig base = PipelineConfig{});
PipelineConfig load_config(const std::filesystem::path& path,
                           PipelineConfig base = PipelineConfig{});
// Applies one key/value pair, as in a config file line.
void apply_config_value(PipelineConfig& cfg, std::string_view key,
                        std::string_view value);
std::string format_config(const PipelineConfig& cfg);

}  // namespace cdseg

#endif  // CDSEG_IO_H_
