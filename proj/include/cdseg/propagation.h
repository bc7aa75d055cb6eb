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

// Scribble-driven label propagation: per-class constrained dominant sets on
// the superpixel affinity graph, conflict resolution, mask rendering and
// majority voting over color spaces and FH scales.

#ifndef CDSEG_PROPAGATION_H_
#define CDSEG_PROPAGATION_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdseg/config.h"
#include "cdseg/dynamics.h"
#include "cdseg/features.h"
#include "cdseg/graph_core.h"
#include "cdseg/image.h"
#include "cdseg/superpixels.h"

namespace cdseg {

inline constexpr int kNoClass = -1;

// Sparse per-pixel class annotation; kNoClass marks unannotated pixels.
class ScribbleSet {
 public:
  ScribbleSet() = default;
  ScribbleSet(int width, int height, std::vector<int> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  int label(int x, int y) const { return labels_[y * width_ + x]; }
  int label_at(int p) const { return labels_[p]; }
  const std::vector<int>& labels() const { return labels_; }
  // Sorted ids with at least one annotated pixel.
  const std::vector<int>& classes_present() const { return classes_; }
  bool empty() const { return classes_.empty(); }

  // Throws std::invalid_argument for ids >= n_cl.
  void check_classes(int n_cl) const;

  bool operator==(const ScribbleSet&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<int> labels_;
  std::vector<int> classes_;
};

// Dense class-id image.
class LabelMask {
 public:
  LabelMask() = default;
  LabelMask(int width, int height, std::vector<std::uint8_t> labels);
  static LabelMask filled(int width, int height, std::uint8_t value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t label(int x, int y) const { return labels_[y * width_ + x]; }
  std::uint8_t label_at(int p) const { return labels_[p]; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  bool operator==(const LabelMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> labels_;
};

// Raised when a class loses every seed superpixel to other classes.
class EmptySeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seed superpixels per class, indexed by class id (empty for absent
// classes). A superpixel scribbled by several classes goes to the class with
// the most scribbled pixels in it, ties to the smaller id.
std::vector<VertexSet> resolve_seeds(const ScribbleSet& scr,
                                     const SuperpixelMap& sp);

// Seeds of one class. Throws std::invalid_argument when the class has no
// scribble and EmptySeedError when all its superpixels were contested away.
VertexSet seeds_from_scribbles(const ScribbleSet& scr, const SuperpixelMap& sp,
                               int class_id);

struct ClassSegments {
  int class_id = 0;
  VertexSet uds;
  std::vector<double> confidence;  // per vertex, > 0 exactly on uds
  VertexSet uncovered_seeds;
  int unconverged = 0;
};

ClassSegments propagate_class(const AffinityGraph& a, const VertexSet& seeds,
                              int class_id, const SolverConfig& cfg);

struct Assignment {
  std::vector<int> labels;         // per superpixel
  std::vector<double> confidence;  // winning confidence, 0 if flood filled
  int flood_filled = 0;
  int unreachable = 0;             // fell back to the most confident class
};

// Members of one uds take its class; overlaps go to the larger confidence
// (ties to the smaller class id). Remaining vertices are flood filled in
// order of decreasing affinity to an already labeled neighbor.
Assignment assign_labels(const std::vector<ClassSegments>& segments,
                         const AffinityGraph& a);

LabelMask render_mask(const SuperpixelMap& sp, const std::vector<int>& labels);

struct VoteResult {
  LabelMask mask;
  std::vector<double> agreement;  // winning votes / voters, per pixel
};

// Per-pixel plurality, ties to the smaller class id.
VoteResult majority_vote_with_agreement(const std::vector<LabelMask>& masks);
LabelMask majority_vote(const std::vector<LabelMask>& masks);

// One (color space, k, sigma_fh) combination.
struct MapSpec {
  ColorSpace space = ColorSpace::kIntensity;
  double k = 300.0;
  double sigma_fh = 0.8;
};

// Scribble-independent artifacts of one map.
struct PreparedMap {
  MapSpec spec;
  SuperpixelMap superpixels;
  std::vector<VertexPair> adjacency;
  std::vector<FeatureVector> features;
  SigmaGrid grid;
  std::vector<AffinityGraph> affinities;  // one per grid candidate
};

struct PreparedImage {
  int width = 0;
  int height = 0;
  std::vector<PreparedMap> maps;
  std::vector<std::string> warnings;  // maps that failed to prepare

  std::vector<int> superpixel_counts() const;
  // FNV-1a over superpixel labels, features and affinities.
  std::uint64_t checksum() const;
};

PreparedMap prepare_map(const Image8& image, const MapSpec& spec,
                        const PipelineConfig& cfg);
PreparedImage prepare_image(const Image8& image, const PipelineConfig& cfg);

struct MapOutcome {
  MapSpec spec;
  bool ok = false;
  std::string error;
  SigmaChoice sigma;
  std::vector<ClassSegments> segments;
  Assignment assignment;
  LabelMask mask;
};

// Labels one prepared map, picking sigma by scribble self-consistency when
// the grid has several candidates.
MapOutcome run_map(const PreparedMap& map, const ScribbleSet& scr,
                   const PipelineConfig& cfg);

// Fraction of seed superpixels whose label equals their seed class.
double scribble_consistency(const std::vector<VertexSet>& seeds,
                            const std::vector<int>& labels);

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineResult {
  LabelMask mask;
  std::vector<double> agreement;
  double sigma_fh = 0.0;
  std::vector<MapOutcome> maps;  // maps voted on, in grid order
  std::vector<std::string> warnings;
};

// Scribble-dependent stages against prepared artifacts. Failed maps are
// dropped with a warning; throws PipelineError if none survive.
PipelineResult run_scribbles(const PreparedImage& prepared,
                             const ScribbleSet& scr, const PipelineConfig& cfg);

PipelineResult full_pipeline(const Image8& image, const ScribbleSet& scr,
                             const PipelineConfig& cfg);

// One color space and one k.
LabelMask segment_single(const Image8& image, const ScribbleSet& scr,
                         ColorSpace space, const FhParams& params,
                         const PipelineConfig& cfg);

}  // namespace cdseg

#endif  // CDSEG_PROPAGATION_H_
