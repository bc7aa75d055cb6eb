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

#ifndef CDSEG_CONFIG_H_
#define CDSEG_CONFIG_H_

#include <optional>
#include <vector>

#include "cdseg/dynamics.h"
#include "cdseg/features.h"

namespace cdseg {

enum class VoteMode {
  kFlat,      // one vote over every (space, k) map
  kTwoStage,  // vote over k per space, then over spaces
};

struct PipelineConfig {
  std::vector<ColorSpace> color_spaces = {kAllColorSpaces.begin(),
                                          kAllColorSpaces.end()};
  std::vector<double> k_values = {225.0, 250.0, 300.0, 400.0};
  // nullopt selects per image among sigma_fh_candidates.
  std::optional<double> sigma_fh = 0.8;
  // Listed in preference order for ties.
  std::vector<double> sigma_fh_candidates = {0.8, 0.7};
  // nullopt searches the corresponding axis of sigma_grid per map.
  std::optional<double> sigma_c;
  std::optional<double> sigma_t;
  SigmaGrid sigma_grid;
  SolverConfig solver;
  int min_size = 20;
  int n_cl = 21;
  int ignore_label = 255;
  int workers = 1;
  VoteMode vote = VoteMode::kFlat;

  // Throws std::invalid_argument on empty lists or out-of-range values.
  void validate() const;

  // Sigma candidates actually searched, honoring fixed values.
  SigmaGrid effective_sigma_grid() const;
  std::vector<double> effective_sigma_fh() const;

  // Reduced grid for interactive sessions: Intensity + Lab, k {250, 400}.
  static PipelineConfig interactive();
};

}  // namespace cdseg

#endif  // CDSEG_CONFIG_H_
