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

#ifndef CDSEG_METRICS_H_
#define CDSEG_METRICS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdseg/propagation.h"

namespace cdseg {

// counts(i, j) = pixels of ground-truth class i predicted as j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_cl);

  int classes() const { return n_cl_; }
  std::int64_t operator()(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * n_cl_ + pred];
  }
  void add(int gt, int pred, std::int64_t count = 1);
  // t_i = sum_j n_ij
  std::int64_t gt_total(int i) const;
  std::int64_t pred_total(int j) const;
  std::int64_t total() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int n_cl_;
  std::vector<std::int64_t> counts_;
};

// Counts pixels whose ground truth differs from ignore_label. Throws
// std::invalid_argument on size mismatch or labels that are neither below
// n_cl nor ignore_label (predictions must be below n_cl).
ConfusionMatrix accumulate(const LabelMask& pred, const LabelMask& gt, int n_cl,
                           int ignore_label = 255);

// sum_i n_ii / sum_i t_i
double pixel_accuracy(const ConfusionMatrix& cm);
// Mean of n_ii / t_i over classes with t_i > 0.
double mean_accuracy(const ConfusionMatrix& cm);
// n_ii / (t_i + sum_j n_ji - n_ii); nullopt for classes absent from both
// ground truth and prediction.
std::vector<std::optional<double>> per_class_iou(const ConfusionMatrix& cm);
// Mean of the defined per-class IoUs.
double mean_iou(const ConfusionMatrix& cm);

// Per-class IoU table followed by the three aggregate scores.
std::string format_report(const ConfusionMatrix& cm);

}  // namespace cdseg

#endif  // CDSEG_METRICS_H_
