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

#include "cdseg/metrics.h"

#include <cstdio>
#include <stdexcept>

namespace cdseg {

ConfusionMatrix::ConfusionMatrix(int n_cl) : n_cl_(n_cl) {
  if (n_cl < 1) throw std::invalid_argument("ConfusionMatrix: n_cl must be >= 1");
  counts_.assign(static_cast<std::size_t>(n_cl) * n_cl, 0);
}

void ConfusionMatrix::add(int gt, int pred, std::int64_t count) {
  if (gt < 0 || gt >= n_cl_ || pred < 0 || pred >= n_cl_) {
    throw std::out_of_range("ConfusionMatrix: class id out of range");
  }
  counts_[static_cast<std::size_t>(gt) * n_cl_ + pred] += count;
}

std::int64_t ConfusionMatrix::gt_total(int i) const {
  std::int64_t t = 0;
  for (int j = 0; j < n_cl_; ++j) t += (*this)(i, j);
  return t;
}

std::int64_t ConfusionMatrix::pred_total(int j) const {
  std::int64_t t = 0;
  for (int i = 0; i < n_cl_; ++i) t += (*this)(i, j);
  return t;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (std::int64_t c : counts_) t += c;
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_cl_ != n_cl_) {
    throw std::invalid_argument("ConfusionMatrix: class counts differ");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix accumulate(const LabelMask& pred, const LabelMask& gt, int n_cl,
                           int ignore_label) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw std::invalid_argument("accumulate: prediction and ground truth differ in size");
  }
  ConfusionMatrix cm(n_cl);
  for (std::size_t p = 0; p < gt.labels().size(); ++p) {
    const int g = gt.labels()[p];
    const int q = pred.labels()[p];
    if (g == ignore_label) continue;
    if (g >= n_cl) {
      throw std::invalid_argument("accumulate: ground-truth label " +
                                  std::to_string(g) + " out of range");
    }
    if (q >= n_cl) {
      throw std::invalid_argument("accumulate: predicted label " +
                                  std::to_string(q) + " out of range");
    }
    cm.add(g, q);
  }
  return cm;
}

namespace {

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::domain_error("confusion matrix is all zero");
}

}  // namespace

double pixel_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  std::int64_t diag = 0;
  for (int i = 0; i < cm.classes(); ++i) diag += cm(i, i);
  return static_cast<double>(diag) / static_cast<double>(cm.total());
}

double mean_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  double sum = 0.0;
  int present = 0;
  for (int i = 0; i < cm.classes(); ++i) {
    const std::int64_t t = cm.gt_total(i);
    if (t == 0) continue;
    sum += static_cast<double>(cm(i, i)) / static_cast<double>(t);
    ++present;
  }
  if (present == 0) throw std::domain_error("mean_accuracy: no ground-truth pixels");
  return sum / present;
}

std::vector<std::optional<double>> per_class_iou(const ConfusionMatrix& cm) {
  std::vector<std::optional<double>> out(cm.classes());
  for (int i = 0; i < cm.classes(); ++i) {
    const std::int64_t uni = cm.gt_total(i) + cm.pred_total(i) - cm(i, i);
    if (uni > 0) out[i] = static_cast<double>(cm(i, i)) / static_cast<double>(uni);
  }
  return out;
}

double mean_iou(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  double sum = 0.0;
  int present = 0;
  for (const auto& iou : per_class_iou(cm)) {
    if (!iou) continue;
    sum += *iou;
    ++present;
  }
  return sum / present;
}

std::string format_report(const ConfusionMatrix& cm) {
  std::string out = "class  iou\n";
  char line[64];
  const auto ious = per_class_iou(cm);
  for (int i = 0; i < cm.classes(); ++i) {
    if (ious[i]) {
      std::snprintf(line, sizeof(line), "%5d  %.4f\n", i, *ious[i]);
    } else {
      std::snprintf(line, sizeof(line), "%5d  -\n", i);
    }
    out += line;
  }
  std::snprintf(line, sizeof(line), "pixel_accuracy %.4f\n", pixel_accuracy(cm));
  out += line;
  std::snprintf(line, sizeof(line), "mean_accuracy %.4f\n", mean_accuracy(cm));
  out += line;
  std::snprintf(line, sizeof(line), "mean_iou %.4f\n", mean_iou(cm));
  out += line;
  return out;
}

}  // namespace cdseg
