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

#include "cdseg/propagation.h"

#include <algorithm>
#include <array>
#include <cstring>
#include <optional>
#include <limits>
#include <map>
#include <queue>
#include <tuple>

#include "parallel.h"

namespace cdseg {

ScribbleSet::ScribbleSet(int width, int height, std::vector<int> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 0 || height < 0 ||
      labels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("ScribbleSet: size mismatch");
  }
  for (int l : labels_) {
    if (l < kNoClass || l > 254) {
      throw std::invalid_argument("ScribbleSet: class id out of range");
    }
    if (l != kNoClass) classes_.push_back(l);
  }
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
}

void ScribbleSet::check_classes(int n_cl) const {
  if (!classes_.empty() && classes_.back() >= n_cl) {
    throw std::invalid_argument("scribble class " +
                                std::to_string(classes_.back()) +
                                " not below n_cl = " + std::to_string(n_cl));
  }
}

LabelMask::LabelMask(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 0 || height < 0 ||
      labels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("LabelMask: size mismatch");
  }
}

LabelMask LabelMask::filled(int width, int height, std::uint8_t value) {
  return LabelMask(width, height,
                   std::vector<std::uint8_t>(
                       static_cast<std::size_t>(width) * height, value));
}

std::vector<VertexSet> resolve_seeds(const ScribbleSet& scr,
                                     const SuperpixelMap& sp) {
  if (scr.width() != sp.width() || scr.height() != sp.height()) {
    throw std::invalid_argument("scribbles and superpixels differ in size");
  }
  const int n_classes = scr.empty() ? 0 : scr.classes_present().back() + 1;
  // votes[superpixel][class] = scribbled pixel count
  std::vector<std::map<int, int>> votes(sp.count());
  for (int p = 0; p < sp.width() * sp.height(); ++p) {
    const int c = scr.label_at(p);
    if (c != kNoClass) ++votes[sp.label_at(p)][c];
  }
  std::vector<VertexSet> seeds(n_classes);
  for (int v = 0; v < sp.count(); ++v) {
    int winner = kNoClass, best = 0;
    for (const auto& [c, count] : votes[v]) {  // ascending class id
      if (count > best) {
        winner = c;
        best = count;
      }
    }
    if (winner != kNoClass) seeds[winner].push_back(v);
  }
  return seeds;
}

VertexSet seeds_from_scribbles(const ScribbleSet& scr, const SuperpixelMap& sp,
                               int class_id) {
  const auto& present = scr.classes_present();
  if (!std::binary_search(present.begin(), present.end(), class_id)) {
    throw std::invalid_argument("class " + std::to_string(class_id) +
                                " has no scribbles");
  }
  VertexSet seeds = resolve_seeds(scr, sp)[class_id];
  if (seeds.empty()) {
    throw EmptySeedError("class " + std::to_string(class_id) +
                         " lost all seed superpixels to other classes");
  }
  return seeds;
}

ClassSegments propagate_class(const AffinityGraph& a, const VertexSet& seeds,
                              int class_id, const SolverConfig& cfg) {
  CdsCollection collection = extract_cds_collection(a, seeds, cfg);
  ClassSegments out;
  out.class_id = class_id;
  out.confidence.assign(a.size(), 0.0);
  for (const DominantSetResult& set : collection.sets) {
    for (int v : set.support) {
      out.uds.push_back(v);
      out.confidence[v] = set.chi[v];
    }
  }
  std::sort(out.uds.begin(), out.uds.end());
  out.uncovered_seeds = std::move(collection.uncovered_seeds);
  out.unconverged = collection.unconverged;
  return out;
}

Assignment assign_labels(const std::vector<ClassSegments>& segments,
                         const AffinityGraph& a) {
  if (segments.empty()) throw std::invalid_argument("assign_labels: no segments");
  const int n = a.size();
  Assignment out;
  out.labels.assign(n, kNoClass);
  out.confidence.assign(n, 0.0);

  int top_class = kNoClass;
  double top_confidence = -1.0;
  for (const ClassSegments& seg : segments) {
    if (static_cast<int>(seg.confidence.size()) != n) {
      throw std::invalid_argument("assign_labels: confidence size mismatch");
    }
    for (int v : seg.uds) {
      const double c = seg.confidence[v];
      if (out.labels[v] == kNoClass || c > out.confidence[v] ||
          (c == out.confidence[v] && seg.class_id < out.labels[v])) {
        out.labels[v] = seg.class_id;
        out.confidence[v] = c;
      }
      if (c > top_confidence ||
          (c == top_confidence && seg.class_id < top_class)) {
        top_class = seg.class_id;
        top_confidence = c;
      }
    }
  }
  if (top_class == kNoClass) {
    top_class = std::min_element(segments.begin(), segments.end(),
                                 [](const auto& l, const auto& r) {
                                   return l.class_id < r.class_id;
                                 })->class_id;
  }

  // Highest affinity first, then smaller unlabeled vertex, then smaller
  // labeled neighbor.
  using Entry = std::tuple<double, int, int>;
  auto worse = [](const Entry& l, const Entry& r) {
    if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) < std::get<0>(r);
    if (std::get<1>(l) != std::get<1>(r)) return std::get<1>(l) > std::get<1>(r);
    return std::get<2>(l) > std::get<2>(r);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> frontier(worse);
  auto push_neighbors = [&](int u) {
    for (int v : a.neighbors(u)) {
      if (out.labels[v] == kNoClass && a(u, v) > 0.0) frontier.emplace(a(u, v), v, u);
    }
  };
  for (int u = 0; u < n; ++u) {
    if (out.labels[u] != kNoClass) push_neighbors(u);
  }
  while (!frontier.empty()) {
    const auto [w, v, u] = frontier.top();
    frontier.pop();
    if (out.labels[v] != kNoClass) continue;
    out.labels[v] = out.labels[u];
    ++out.flood_filled;
    push_neighbors(v);
  }
  for (int v = 0; v < n; ++v) {
    if (out.labels[v] == kNoClass) {
      out.labels[v] = top_class;
      ++out.unreachable;
    }
  }
  return out;
}

LabelMask render_mask(const SuperpixelMap& sp, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != sp.count()) {
    throw std::invalid_argument("render_mask: label count != superpixel count");
  }
  std::vector<std::uint8_t> pixels(sp.labels().size());
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    const int l = labels[sp.label_at(static_cast<int>(p))];
    if (l < 0 || l > 255) throw std::invalid_argument("render_mask: bad label");
    pixels[p] = static_cast<std::uint8_t>(l);
  }
  return LabelMask(sp.width(), sp.height(), std::move(pixels));
}

VoteResult majority_vote_with_agreement(const std::vector<LabelMask>& masks) {
  if (masks.empty()) throw std::invalid_argument("majority_vote: no masks");
  const int w = masks[0].width(), h = masks[0].height();
  for (const LabelMask& m : masks) {
    if (m.width() != w || m.height() != h) {
      throw std::invalid_argument("majority_vote: mask dimensions differ");
    }
  }
  VoteResult out;
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h);
  out.agreement.resize(labels.size());
  std::array<int, 256> counts{};
  for (std::size_t p = 0; p < labels.size(); ++p) {
    for (const LabelMask& m : masks) ++counts[m.labels()[p]];
    int best = 0;
    for (int c = 1; c < 256; ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    labels[p] = static_cast<std::uint8_t>(best);
    out.agreement[p] = static_cast<double>(counts[best]) / masks.size();
    for (const LabelMask& m : masks) counts[m.labels()[p]] = 0;
  }
  out.mask = LabelMask(w, h, std::move(labels));
  return out;
}

LabelMask majority_vote(const std::vector<LabelMask>& masks) {
  return majority_vote_with_agreement(masks).mask;
}

std::vector<int> PreparedImage::superpixel_counts() const {
  std::vector<int> out;
  for (const PreparedMap& m : maps) out.push_back(m.superpixels.count());
  return out;
}

namespace {

class Fnv1a {
 public:
  void add(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ull;
    }
  }
  template <typename T>
  void add_vector(const std::vector<T>& v) {
    add(v.data(), v.size() * sizeof(T));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ull;
};

}  // namespace

std::uint64_t PreparedImage::checksum() const {
  Fnv1a h;
  for (const PreparedMap& m : maps) {
    h.add_vector(m.superpixels.labels());
    for (const FeatureVector& f : m.features) {
      h.add_vector(f.color);
      h.add_vector(f.texture);
    }
    for (const AffinityGraph& a : m.affinities) h.add_vector(a.weights().data());
  }
  return h.value();
}

PreparedMap prepare_map(const Image8& image, const MapSpec& spec,
                        const PipelineConfig& cfg) {
  if (image.empty()) throw std::invalid_argument("prepare_map: empty image");
  PreparedMap map;
  map.spec = spec;
  const ImageF channels = convert_color_space(image, spec.space);
  FhParams params{spec.k, spec.sigma_fh, cfg.min_size};
  map.superpixels = segment_superpixels(channels, params);
  map.adjacency = adjacency(map.superpixels);
  map.features = all_superpixel_features(channels, map.superpixels,
                                         gradient_channel(spec.space));
  map.grid = cfg.effective_sigma_grid();
  for (std::size_t i = 0; i < map.grid.size(); ++i) {
    const auto [sc, st] = map.grid.candidate(i);
    map.affinities.push_back(build_affinity(map.features, map.adjacency, sc, st));
  }
  return map;
}

namespace {

std::vector<MapSpec> map_specs(const PipelineConfig& cfg) {
  std::vector<MapSpec> specs;
  for (double s : cfg.effective_sigma_fh()) {
    for (ColorSpace space : cfg.color_spaces) {
      for (double k : cfg.k_values) specs.push_back({space, k, s});
    }
  }
  return specs;
}

std::string describe(const MapSpec& spec) {
  return to_string(spec.space) + "/k=" + std::to_string(spec.k) +
         "/sigma_fh=" + std::to_string(spec.sigma_fh);
}

struct Labeling {
  std::vector<ClassSegments> segments;
  Assignment assignment;
  double score = 0.0;
};

}  // namespace

PreparedImage prepare_image(const Image8& image, const PipelineConfig& cfg) {
  cfg.validate();
  if (image.empty()) throw std::invalid_argument("prepare_image: empty image");
  const std::vector<MapSpec> specs = map_specs(cfg);
  std::vector<std::optional<PreparedMap>> slots(specs.size());
  std::vector<std::string> errors(specs.size());
  internal::parallel_for(specs.size(), cfg.workers, [&](std::size_t i) {
    try {
      slots[i] = prepare_map(image, specs[i], cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  PreparedImage out;
  out.width = image.width();
  out.height = image.height();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (slots[i]) {
      out.maps.push_back(std::move(*slots[i]));
    } else {
      out.warnings.push_back("dropped " + describe(specs[i]) + ": " + errors[i]);
    }
  }
  return out;
}

double scribble_consistency(const std::vector<VertexSet>& seeds,
                            const std::vector<int>& labels) {
  int total = 0, agree = 0;
  for (std::size_t c = 0; c < seeds.size(); ++c) {
    for (int v : seeds[c]) {
      ++total;
      if (labels[v] == static_cast<int>(c)) ++agree;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / total;
}

MapOutcome run_map(const PreparedMap& map, const ScribbleSet& scr,
                   const PipelineConfig& cfg) {
  MapOutcome out;
  out.spec = map.spec;
  const std::vector<VertexSet> seeds = resolve_seeds(scr, map.superpixels);
  std::vector<int> classes;
  for (int c : scr.classes_present()) {
    if (!seeds[c].empty()) classes.push_back(c);
  }
  if (classes.empty()) {
    throw EmptySeedError("no class retained a seed superpixel");
  }

  std::vector<Labeling> candidates(map.affinities.size());
  std::vector<double> scores(map.affinities.size());
  for (std::size_t i = 0; i < map.affinities.size(); ++i) {
    const AffinityGraph& a = map.affinities[i];
    Labeling& lab = candidates[i];
    for (int c : classes) {
      lab.segments.push_back(propagate_class(a, seeds[c], c, cfg.solver));
    }
    lab.assignment = assign_labels(lab.segments, a);
    scores[i] = lab.score = scribble_consistency(seeds, lab.assignment.labels);
  }
  const std::size_t best = select_best_candidate(map.grid, scores);
  const auto [sc, st] = map.grid.candidate(best);
  out.sigma = {sc, st, best, scores[best]};
  out.segments = std::move(candidates[best].segments);
  out.assignment = std::move(candidates[best].assignment);
  out.mask = render_mask(map.superpixels, out.assignment.labels);
  out.ok = true;
  return out;
}

namespace {

VoteResult vote(const std::vector<MapOutcome>& maps, VoteMode mode) {
  std::vector<LabelMask> masks;
  if (mode == VoteMode::kFlat) {
    for (const MapOutcome& m : maps) masks.push_back(m.mask);
    return majority_vote_with_agreement(masks);
  }
  std::vector<ColorSpace> spaces;
  for (const MapOutcome& m : maps) {
    if (std::find(spaces.begin(), spaces.end(), m.spec.space) == spaces.end()) {
      spaces.push_back(m.spec.space);
    }
  }
  for (ColorSpace s : spaces) {
    std::vector<LabelMask> per_space;
    for (const MapOutcome& m : maps) {
      if (m.spec.space == s) per_space.push_back(m.mask);
    }
    masks.push_back(majority_vote(per_space));
  }
  return majority_vote_with_agreement(masks);
}

double pixel_consistency(const ScribbleSet& scr, const LabelMask& mask) {
  int total = 0, agree = 0;
  for (int p = 0; p < scr.width() * scr.height(); ++p) {
    const int c = scr.label_at(p);
    if (c == kNoClass) continue;
    ++total;
    if (mask.label_at(p) == c) ++agree;
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / total;
}

}  // namespace

PipelineResult run_scribbles(const PreparedImage& prepared,
                             const ScribbleSet& scr,
                             const PipelineConfig& cfg) {
  cfg.validate();
  if (scr.empty()) throw std::invalid_argument("scribble set is empty");
  if (scr.width() != prepared.width || scr.height() != prepared.height) {
    throw std::invalid_argument("scribbles and image differ in size");
  }
  scr.check_classes(cfg.n_cl);

  std::vector<MapOutcome> outcomes(prepared.maps.size());
  internal::parallel_for(prepared.maps.size(), cfg.workers, [&](std::size_t i) {
    try {
      outcomes[i] = run_map(prepared.maps[i], scr, cfg);
    } catch (const std::exception& e) {
      outcomes[i].spec = prepared.maps[i].spec;
      outcomes[i].ok = false;
      outcomes[i].error = e.what();
    }
  });

  PipelineResult best;
  double best_score = -1.0;
  bool any = false;
  std::vector<std::string> warnings = prepared.warnings;
  for (const MapOutcome& m : outcomes) {
    if (!m.ok) warnings.push_back("dropped " + describe(m.spec) + ": " + m.error);
  }
  for (double sigma_fh : cfg.effective_sigma_fh()) {
    std::vector<MapOutcome> group;
    for (const MapOutcome& m : outcomes) {
      if (m.ok && m.spec.sigma_fh == sigma_fh) group.push_back(m);
    }
    if (group.empty()) continue;
    VoteResult voted = vote(group, cfg.vote);
    const double score = pixel_consistency(scr, voted.mask);
    if (!any || score > best_score) {
      any = true;
      best_score = score;
      best.mask = std::move(voted.mask);
      best.agreement = std::move(voted.agreement);
      best.sigma_fh = sigma_fh;
      best.maps = std::move(group);
    }
  }
  if (!any) {
    std::string msg = "every (color space, k) job failed";
    if (!warnings.empty()) msg += "; first: " + warnings.front();
    throw PipelineError(msg);
  }
  best.warnings = std::move(warnings);
  return best;
}

PipelineResult full_pipeline(const Image8& image, const ScribbleSet& scr,
                             const PipelineConfig& cfg) {
  return run_scribbles(prepare_image(image, cfg), scr, cfg);
}

LabelMask segment_single(const Image8& image, const ScribbleSet& scr,
                         ColorSpace space, const FhParams& params,
                         const PipelineConfig& cfg) {
  params.validate();
  PipelineConfig single = cfg;
  single.color_spaces = {space};
  single.k_values = {params.k};
  single.sigma_fh = params.sigma_fh;
  single.min_size = params.min_size;
  if (scr.empty()) throw std::invalid_argument("scribble set is empty");
  scr.check_classes(single.n_cl);
  const PreparedMap map = prepare_map(image, {space, params.k, params.sigma_fh},
                                      single);
  return run_map(map, scr, single).mask;
}

}  // namespace cdseg
