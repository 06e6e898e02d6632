/* Copyright 2026 The wsseg Authors. All Rights Reserved.

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

#include "wsseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wsseg/error.hpp"

namespace wsseg {
namespace {

void check_dims(int width, int height, int num_classes) {
  if (width <= 0 || height <= 0) {
    throw Error("grid dimensions must be positive");
  }
  if (num_classes < 1 || num_classes > kMaxClasses) {
    throw Error("num_classes out of range: " + std::to_string(num_classes));
  }
}

}  // namespace

LabelGrid::LabelGrid(int width, int height, int num_classes, Label fill)
    : width_(width), height_(height), num_classes_(num_classes) {
  check_dims(width, height, num_classes);
  if (fill != kUnknown && fill >= num_classes) throw Error("fill label out of range");
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

LabelGrid::LabelGrid(int width, int height, int num_classes, std::vector<Label> values)
    : width_(width), height_(height), num_classes_(num_classes), values_(std::move(values)) {
  check_dims(width, height, num_classes);
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error("label vector size does not match grid dimensions");
  }
  for (Label v : values_) {
    if (v != kUnknown && v >= num_classes) {
      throw Error("label " + std::to_string(v) + " out of range for " +
                  std::to_string(num_classes) + " classes");
    }
  }
}

void LabelGrid::set(std::size_t i, Label value) {
  if (value != kUnknown && value >= num_classes_) {
    throw Error("label " + std::to_string(value) + " out of range");
  }
  values_.at(i) = value;
}

std::size_t LabelGrid::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](Label v) { return v != kUnknown; }));
}

ProbGrid::ProbGrid(int width, int height, int num_classes, double fill)
    : width_(width), height_(height), num_classes_(num_classes) {
  check_dims(width, height, num_classes);
  data_.assign(pixel_count() * static_cast<std::size_t>(num_classes), fill);
}

void ProbGrid::normalize() {
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    auto p = pixel(i);
    double sum = 0.0;
    for (double v : p) sum += v;
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      throw Error("cannot normalize pixel " + std::to_string(i) + " with sum " +
                  std::to_string(sum));
    }
    for (double& v : p) v /= sum;
  }
}

bool ProbGrid::is_valid(double tol) const {
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double v : pixel(i)) {
      if (!(v >= 0.0 && v <= 1.0 + tol)) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

LabelGrid ProbGrid::argmax(bool ties_unknown) const {
  LabelGrid out(width_, height_, num_classes_);
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    auto p = pixel(i);
    int best = 0;
    bool tie = false;
    for (int c = 1; c < num_classes_; ++c) {
      if (p[c] > p[best]) {
        best = c;
        tie = false;
      } else if (p[c] == p[best]) {
        tie = true;
      }
    }
    out.set(i, (tie && ties_unknown) ? kUnknown : static_cast<Label>(best));
  }
  return out;
}

ProbGrid ProbGrid::one_hot(const LabelGrid& labels, const ProbGrid* fill_unknown) {
  ProbGrid out(labels.width(), labels.height(), labels.num_classes());
  if (fill_unknown != nullptr && !out.same_shape(*fill_unknown)) {
    throw Error("one_hot: fill grid shape mismatch");
  }
  const double uniform = 1.0 / labels.num_classes();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto dst = out.pixel(i);
    if (labels.is_unknown(i)) {
      if (fill_unknown != nullptr) {
        auto src = fill_unknown->pixel(i);
        std::copy(src.begin(), src.end(), dst.begin());
      } else {
        std::fill(dst.begin(), dst.end(), uniform);
      }
    } else {
      dst[labels[i]] = 1.0;
    }
  }
  return out;
}

PixelFeatures extract_features(const RgbImage& image) {
  if (image.empty() || image.data.size() != image.pixel_count() * 3) {
    throw Error("extract_features: empty or malformed image");
  }
  const int w = image.width;
  const int h = image.height;
  PixelFeatures f;
  f.width = w;
  f.height = h;
  f.data.assign(image.pixel_count() * kFeatureDim, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double* out = f.data.data() + i * kFeatureDim;
      for (int ch = 0; ch < 3; ++ch) out[ch] = image.at(i, ch);
      out[3] = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      out[4] = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
      double sum[3] = {0.0, 0.0, 0.0};
      int count = 0;
      for (int yy = std::max(0, y - 1); yy <= std::min(h - 1, y + 1); ++yy) {
        for (int xx = std::max(0, x - 1); xx <= std::min(w - 1, x + 1); ++xx) {
          const std::size_t j = static_cast<std::size_t>(yy) * w + xx;
          for (int ch = 0; ch < 3; ++ch) sum[ch] += image.at(j, ch);
          ++count;
        }
      }
      for (int ch = 0; ch < 3; ++ch) out[5 + ch] = sum[ch] / count;
    }
  }
  return f;
}

SegmentationScorer::SegmentationScorer(int num_classes)
    : num_classes_(num_classes),
      intersection_(static_cast<std::size_t>(num_classes), 0),
      union_(static_cast<std::size_t>(num_classes), 0),
      gt_count_(static_cast<std::size_t>(num_classes), 0) {}

void SegmentationScorer::add(const LabelGrid& pred, const LabelGrid& gt) {
  if (!pred.same_shape(gt)) throw Error("metrics: dimension mismatch");
  if (gt.num_classes() > num_classes_ || pred.num_classes() > num_classes_) {
    throw Error("metrics: class count exceeds scorer capacity");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Label g = gt[i];
    const Label p = pred[i];
    if (g == kUnknown) throw Error("metrics: ground truth contains UNKNOWN");
    ++gt_count_[g];
    if (p == kUnknown) {
      ++union_[g];
      continue;
    }
    ++labeled_;
    if (p == g) {
      ++correct_;
      ++intersection_[g];
      ++union_[g];
    } else {
      ++union_[g];
      ++union_[p];
    }
  }
}

Metrics SegmentationScorer::result() const {
  Metrics m;
  m.per_class_iou.assign(static_cast<std::size_t>(num_classes_),
                         std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_classes_; ++c) {
    if (gt_count_[c] == 0) continue;
    const double iou = static_cast<double>(intersection_[c]) / static_cast<double>(union_[c]);
    m.per_class_iou[c] = iou;
    sum += iou;
    ++present;
  }
  m.mean_iou = present > 0 ? sum / present : 0.0;
  if (labeled_ == 0) {
    m.precision = 1.0;
    m.precision_vacuous = true;
  } else {
    m.precision = static_cast<double>(correct_) / static_cast<double>(labeled_);
  }
  return m;
}

Metrics mean_iou(const LabelGrid& pred, const LabelGrid& gt) {
  SegmentationScorer scorer(std::max(pred.num_classes(), gt.num_classes()));
  scorer.add(pred, gt);
  return scorer.result();
}

double precision(const LabelGrid& pred, const LabelGrid& gt) {
  if (!pred.same_shape(gt)) throw Error("precision: dimension mismatch");
  std::size_t labeled = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred.is_unknown(i)) continue;
    ++labeled;
    if (pred[i] == gt[i]) ++correct;
  }
  return labeled == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(labeled);
}

}  // namespace wsseg
