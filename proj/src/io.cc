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

#include "cdseg/io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace cdseg {

using nlohmann::json;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

bool is_png(const std::vector<std::uint8_t>& bytes) {
  static constexpr std::uint8_t kMagic[8] = {0x89, 'P', 'N', 'G',
                                             '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kMagic, 8) == 0;
}

bool is_ppm(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6';
}

Image8 gray_to_rgb(const Image8& gray) {
  Image8 rgb(gray.width(), gray.height(), 3);
  for (int p = 0; p < gray.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) rgb.at_index(p, c) = gray.at_index(p);
  }
  return rgb;
}

Image8 decode_ppm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    long value = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > (1l << 24)) throw IoError("PPM: header value too large");
      ++pos;
    }
    if (pos == start) throw IoError("PPM: malformed header");
    return static_cast<int>(value);
  };
  const int w = read_int();
  const int h = read_int();
  const int maxval = read_int();
  if (w <= 0 || h <= 0) throw IoError("PPM: invalid dimensions");
  if (maxval != 255) throw IoError("PPM: only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw IoError("PPM: malformed header");
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - pos < need) throw IoError("PPM: truncated pixel data");
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<long>(pos),
                                 bytes.begin() + static_cast<long>(pos + need));
  return Image8(w, h, 3, std::move(data));
}

}  // namespace

Image8 decode_png(const std::vector<std::uint8_t>& bytes) {
  if (!is_png(bytes)) throw IoError("not a PNG stream");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(std::string("PNG decode failed: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  png_color black{0, 0, 0};
  if (!png_image_finish_read(&image, &black, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("PNG decode failed: " + msg);
  }
  return Image8(static_cast<int>(image.width), static_cast<int>(image.height),
                channels, std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const Image8& raster) {
  if (raster.channels() != 1 && raster.channels() != 3) {
    throw IoError("PNG encode: expected 1 or 3 channels");
  }
  if (raster.empty()) throw IoError("PNG encode: empty raster");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width());
  image.height = static_cast<png_uint_32>(raster.height());
  image.format = raster.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, raster.data().data(), 0,
                                       nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0,
                                 raster.data().data(), 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_ppm(const Image8& rgb) {
  if (rgb.channels() != 3) throw IoError("PPM encode: expected RGB");
  const std::string header = "P6\n" + std::to_string(rgb.width()) + " " +
                             std::to_string(rgb.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), rgb.data().begin(), rgb.data().end());
  return out;
}

Image8 decode_image(const std::vector<std::uint8_t>& bytes) {
  if (is_png(bytes)) {
    Image8 img = decode_png(bytes);
    return img.channels() == 1 ? gray_to_rgb(img) : img;
  }
  if (is_ppm(bytes)) return decode_ppm(bytes);
  throw IoError("unsupported image format (expected PNG or binary PPM)");
}

Image8 load_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_png(const Image8& image, const std::filesystem::path& path) {
  write_file(path, encode_png(image));
}

StrokeDocument parse_strokes(std::string_view json_text) {
  StrokeDocument doc;
  try {
    const json j = json::parse(json_text);
    doc.width = j.at("width").get<int>();
    doc.height = j.at("height").get<int>();
    for (const json& s : j.at("strokes")) {
      Stroke stroke;
      stroke.class_id = s.at("class_id").get<int>();
      stroke.width_px = s.at("width_px").get<double>();
      for (const json& pt : s.at("polyline")) {
        if (!pt.is_array() || pt.size() != 2) {
          throw std::invalid_argument("polyline point must be [x, y]");
        }
        stroke.polyline.emplace_back(pt[0].get<double>(), pt[1].get<double>());
      }
      doc.strokes.push_back(std::move(stroke));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("stroke document: ") + e.what());
  }
  if (doc.width <= 0 || doc.height <= 0) {
    throw std::invalid_argument("stroke document: invalid image size");
  }
  for (const Stroke& s : doc.strokes) {
    if (s.class_id < 0 || s.class_id >= kScribbleUnlabeled) {
      throw std::invalid_argument("stroke document: class_id out of range");
    }
    if (!(s.width_px > 0.0)) {
      throw std::invalid_argument("stroke document: width_px must be positive");
    }
    if (s.polyline.empty()) {
      throw std::invalid_argument("stroke document: empty polyline");
    }
  }
  return doc;
}

std::string format_strokes(const StrokeDocument& doc) {
  json j;
  j["width"] = doc.width;
  j["height"] = doc.height;
  j["strokes"] = json::array();
  for (const Stroke& s : doc.strokes) {
    json pts = json::array();
    for (const auto& [x, y] : s.polyline) pts.push_back({x, y});
    j["strokes"].push_back(
        {{"class_id", s.class_id}, {"width_px", s.width_px}, {"polyline", pts}});
  }
  return j.dump(2);
}

namespace {

double point_segment_distance(double px, double py, std::pair<double, double> a,
                              std::pair<double, double> b) {
  const double dx = b.first - a.first, dy = b.second - a.second;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - a.first) * dx + (py - a.second) * dy) / len2, 0.0, 1.0);
  }
  const double cx = a.first + t * dx - px, cy = a.second + t * dy - py;
  return std::sqrt(cx * cx + cy * cy);
}

}  // namespace

ScribbleSet rasterize_strokes(const StrokeDocument& doc) {
  std::vector<int> labels(static_cast<std::size_t>(doc.width) * doc.height,
                          kNoClass);
  for (const Stroke& s : doc.strokes) {
    const double r = s.width_px / 2.0;
    double x0 = s.polyline[0].first, x1 = x0, y0 = s.polyline[0].second, y1 = y0;
    for (const auto& [x, y] : s.polyline) {
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
    const int xa = std::max(0, static_cast<int>(std::floor(x0 - r)));
    const int xb = std::min(doc.width - 1, static_cast<int>(std::ceil(x1 + r)));
    const int ya = std::max(0, static_cast<int>(std::floor(y0 - r)));
    const int yb = std::min(doc.height - 1, static_cast<int>(std::ceil(y1 + r)));
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        double d = std::hypot(x - s.polyline[0].first, y - s.polyline[0].second);
        for (std::size_t i = 1; i < s.polyline.size(); ++i) {
          d = std::min(d, point_segment_distance(x, y, s.polyline[i - 1],
                                                 s.polyline[i]));
        }
        if (d <= r + 1e-9) labels[static_cast<std::size_t>(y) * doc.width + x] = s.class_id;
      }
    }
  }
  return ScribbleSet(doc.width, doc.height, std::move(labels));
}

ScribbleSet scribbles_from_png(const Image8& gray, int n_cl) {
  if (gray.channels() != 1) {
    throw std::invalid_argument("scribble PNG must be single-channel");
  }
  std::vector<int> labels(gray.data().size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const int v = gray.data()[p];
    if (v == kScribbleUnlabeled) {
      labels[p] = kNoClass;
    } else if (v < n_cl) {
      labels[p] = v;
    } else {
      throw std::invalid_argument("scribble value " + std::to_string(v) +
                                  " is neither a class id nor 255");
    }
  }
  ScribbleSet scr(gray.width(), gray.height(), std::move(labels));
  if (scr.empty()) throw std::invalid_argument("scribble set is empty");
  return scr;
}

ScribbleSet decode_scribbles(const std::vector<std::uint8_t>& bytes, int n_cl) {
  ScribbleSet scr;
  if (is_png(bytes)) {
    return scribbles_from_png(decode_png(bytes), n_cl);
  }
  scr = rasterize_strokes(
      parse_strokes(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                     bytes.size())));
  if (scr.empty()) throw std::invalid_argument("scribble set is empty");
  scr.check_classes(n_cl);
  return scr;
}

ScribbleSet load_scribbles(const std::filesystem::path& path, int n_cl) {
  return decode_scribbles(read_file(path), n_cl);
}

Image8 scribbles_to_png_raster(const ScribbleSet& scr) {
  Image8 out(scr.width(), scr.height(), 1);
  for (std::size_t p = 0; p < scr.labels().size(); ++p) {
    const int c = scr.labels()[p];
    out.data()[p] =
        static_cast<std::uint8_t>(c == kNoClass ? kScribbleUnlabeled : c);
  }
  return out;
}

std::vector<std::uint8_t> encode_mask(const LabelMask& mask) {
  return encode_png(Image8(mask.width(), mask.height(), 1, mask.labels()));
}

LabelMask decode_mask(const std::vector<std::uint8_t>& bytes) {
  Image8 img = decode_png(bytes);
  if (img.channels() != 1) throw IoError("mask PNG must be single-channel");
  return LabelMask(img.width(), img.height(), std::move(img.data()));
}

void save_mask(const LabelMask& mask, const std::filesystem::path& path) {
  write_file(path, encode_mask(mask));
}

LabelMask load_mask(const std::filesystem::path& path) {
  try {
    return decode_mask(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double parse_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("config " + std::string(key) + ": bad number '" +
                                std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view key, std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("config " + std::string(key) +
                                ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> parse_doubles(std::string_view key, std::string_view s) {
  std::vector<double> out;
  for (auto item : split_list(s)) out.push_back(parse_double(key, item));
  if (out.empty()) {
    throw std::invalid_argument("config " + std::string(key) + ": empty list");
  }
  return out;
}

std::optional<double> parse_scalar_or_best(std::string_view key,
                                           std::string_view s) {
  if (s == "best") return std::nullopt;
  return parse_double(key, s);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

void apply_config_value(PipelineConfig& cfg, std::string_view key,
                        std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "color_spaces") {
    cfg.color_spaces.clear();
    for (auto item : split_list(value)) {
      cfg.color_spaces.push_back(parse_color_space(item));
    }
  } else if (key == "k_values") {
    cfg.k_values = parse_doubles(key, value);
  } else if (key == "sigma_fh") {
    cfg.sigma_fh = parse_scalar_or_best(key, value);
  } else if (key == "sigma_fh_candidates") {
    cfg.sigma_fh_candidates = parse_doubles(key, value);
  } else if (key == "sigma_c") {
    cfg.sigma_c = parse_scalar_or_best(key, value);
  } else if (key == "sigma_t") {
    cfg.sigma_t = parse_scalar_or_best(key, value);
  } else if (key == "sigma_grid_c") {
    cfg.sigma_grid.sigma_c = parse_doubles(key, value);
  } else if (key == "sigma_grid_t") {
    cfg.sigma_grid.sigma_t = parse_doubles(key, value);
  } else if (key == "tolerance") {
    cfg.solver.tolerance = parse_double(key, value);
  } else if (key == "max_iterations") {
    cfg.solver.max_iterations = parse_int(key, value);
  } else if (key == "alpha_margin") {
    cfg.solver.alpha_margin = parse_double(key, value);
  } else if (key == "alpha_floor") {
    cfg.solver.alpha_floor = parse_double(key, value);
  } else if (key == "min_size") {
    cfg.min_size = parse_int(key, value);
  } else if (key == "n_cl") {
    cfg.n_cl = parse_int(key, value);
  } else if (key == "ignore_label") {
    cfg.ignore_label = parse_int(key, value);
  } else if (key == "workers") {
    cfg.workers = parse_int(key, value);
  } else if (key == "vote") {
    if (value == "flat") {
      cfg.vote = VoteMode::kFlat;
    } else if (value == "two_stage") {
      cfg.vote = VoteMode::kTwoStage;
    } else {
      throw std::invalid_argument("config vote: expected flat or two_stage");
    }
  } else {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    apply_config_value(base, line.substr(0, eq), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path,
                           PipelineConfig base) {
  const auto bytes = read_file(path);
  return parse_config(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
      std::move(base));
}

std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "color_spaces = ";
  for (std::size_t i = 0; i < cfg.color_spaces.size(); ++i) {
    out << (i ? "," : "") << to_string(cfg.color_spaces[i]);
  }
  out << "\nk_values = " << join(cfg.k_values);
  out << "\nsigma_fh = " << (cfg.sigma_fh ? format_double(*cfg.sigma_fh) : "best");
  out << "\nsigma_fh_candidates = " << join(cfg.sigma_fh_candidates);
  out << "\nsigma_c = " << (cfg.sigma_c ? format_double(*cfg.sigma_c) : "best");
  out << "\nsigma_t = " << (cfg.sigma_t ? format_double(*cfg.sigma_t) : "best");
  out << "\nsigma_grid_c = " << join(cfg.sigma_grid.sigma_c);
  out << "\nsigma_grid_t = " << join(cfg.sigma_grid.sigma_t);
  out << "\ntolerance = " << format_double(cfg.solver.tolerance);
  out << "\nmax_iterations = " << cfg.solver.max_iterations;
  out << "\nalpha_margin = " << format_double(cfg.solver.alpha_margin);
  out << "\nalpha_floor = " << format_double(cfg.solver.alpha_floor);
  out << "\nmin_size = " << cfg.min_size;
  out << "\nn_cl = " << cfg.n_cl;
  out << "\nignore_label = " << cfg.ignore_label;
  out << "\nworkers = " << cfg.workers;
  out << "\nvote = " << (cfg.vote == VoteMode::kFlat ? "flat" : "two_stage");
  out << "\n";
  return out.str();
}

}  // namespace cdseg
