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

#include "cdseg/config.h"

#include <stdexcept>

namespace cdseg {

void PipelineConfig::validate() const {
  if (color_spaces.empty()) {
    throw std::invalid_argument("config: color_spaces is empty");
  }
  if (k_values.empty()) throw std::invalid_argument("config: k_values is empty");
  for (double k : k_values) {
    if (!(k > 0.0)) throw std::invalid_argument("config: k must be positive");
  }
  if (effective_sigma_fh().empty()) {
    throw std::invalid_argument("config: sigma_fh_candidates is empty");
  }
  for (double s : effective_sigma_fh()) {
    if (!(s >= 0.0)) {
      throw std::invalid_argument("config: sigma_fh must be non-negative");
    }
  }
  const SigmaGrid grid = effective_sigma_grid();
  if (grid.size() == 0) throw std::invalid_argument("config: empty sigma grid");
  for (double s : grid.sigma_c) {
    if (!(s > 0.0)) throw std::invalid_argument("config: sigma_c must be positive");
  }
  for (double s : grid.sigma_t) {
    if (!(s > 0.0)) throw std::invalid_argument("config: sigma_t must be positive");
  }
  solver.validate();
  if (min_size < 1) throw std::invalid_argument("config: min_size must be >= 1");
  if (n_cl < 1 || n_cl > 255) {
    throw std::invalid_argument("config: n_cl must lie in [1, 255]");
  }
  if (ignore_label < 0 || ignore_label > 255 || ignore_label < n_cl) {
    throw std::invalid_argument(
        "config: ignore_label must lie in [n_cl, 255]");
  }
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
}

SigmaGrid PipelineConfig::effective_sigma_grid() const {
  SigmaGrid grid = sigma_grid;
  if (sigma_c) grid.sigma_c = {*sigma_c};
  if (sigma_t) grid.sigma_t = {*sigma_t};
  return grid;
}

std::vector<double> PipelineConfig::effective_sigma_fh() const {
  if (sigma_fh) return {*sigma_fh};
  return sigma_fh_candidates;
}

PipelineConfig PipelineConfig::interactive() {
  PipelineConfig cfg;
  cfg.color_spaces = {ColorSpace::kIntensity, ColorSpace::kLab};
  cfg.k_values = {250.0, 400.0};
  return cfg;
}

}  // namespace cdseg
