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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wsseg {

using Label = std::uint8_t;

/// Label value for pixels without an assigned class. Never a valid class.
inline constexpr Label kUnknown = 255;
inline constexpr int kMaxClasses = 254;

/// Per-pixel class assignment. Class 0 is background.
class LabelGrid {
 public:
  LabelGrid() = default;
  LabelGrid(int width, int height, int num_classes, Label fill = kUnknown);
  LabelGrid(int width, int height, int num_classes, std::vector<Label> values);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return values_.size(); }

  Label operator[](std::size_t i) const { return values_[i]; }
  Label at(int x, int y) const { return values_[index(x, y)]; }
  bool is_unknown(std::size_t i) const { return values_[i] == kUnknown; }

  /// Throws if `value` is neither kUnknown nor below num_classes().
  void set(std::size_t i, Label value);
  void set(int x, int y, Label value) { set(index(x, y), value); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<const Label> values() const { return values_; }
  std::size_t labeled_count() const;
  bool same_shape(const LabelGrid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int num_classes_ = 0;
  std::vector<Label> values_;
};

/// Per-pixel class-probability field stored pixel-major (N x C).
class ProbGrid {
 public:
  ProbGrid() = default;
  ProbGrid(int width, int height, int num_classes, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_classes() const { return num_classes_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  double& at(std::size_t pixel, int c) {
    return data_[pixel * static_cast<std::size_t>(num_classes_) +
                 static_cast<std::size_t>(c)];
  }
  double at(std::size_t pixel, int c) const {
    return data_[pixel * static_cast<std::size_t>(num_classes_) +
                 static_cast<std::size_t>(c)];
  }
  std::span<double> pixel(std::size_t i) {
    return {data_.data() + i * static_cast<std::size_t>(num_classes_),
            static_cast<std::size_t>(num_classes_)};
  }
  std::span<const double> pixel(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(num_classes_),
            static_cast<std::size_t>(num_classes_)};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Rescales every pixel's vector to sum to one. Throws on a zero or
  /// non-finite pixel sum.
  void normalize();

  /// True when every entry is in [0,1] and each pixel sums to 1 within tol.
  bool is_valid(double tol = 1e-6) const;

  /// Per-pixel argmax. When `ties_unknown` is set, pixels whose maximum is
  /// attained by more than one class become kUnknown.
  LabelGrid argmax(bool ties_unknown = false) const;

  /// One-hot encoding of `labels`; kUnknown pixels copy the matching row of
  /// `fill_unknown`, or become uniform when it is null.
  static ProbGrid one_hot(const LabelGrid& labels,
                          const ProbGrid* fill_unknown = nullptr);

  bool same_shape(const ProbGrid& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           num_classes_ == other.num_classes_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int num_classes_ = 0;
  std::vector<double> data_;
};

/// RGB image with channels in [0,1], stored interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RgbImage() = default;
  RgbImage(int w, int h, double fill = 0.0)
      : width(w), height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {}

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double& at(std::size_t pixel, int ch) { return data[pixel * 3 + static_cast<std::size_t>(ch)]; }
  double at(std::size_t pixel, int ch) const {
    return data[pixel * 3 + static_cast<std::size_t>(ch)];
  }
  bool empty() const { return width <= 0 || height <= 0; }
};

inline constexpr int kFeatureDim = 8;

/// Hand-crafted per-pixel features: RGB, normalized (x, y), 3x3 local mean RGB.
struct PixelFeatures {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // pixel-major, kFeatureDim per pixel

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::span<const double> pixel(std::size_t i) const {
    return {data.data() + i * kFeatureDim, kFeatureDim};
  }
};

/// Throws on an empty image. Border pixels average over the part of the 3x3
/// window inside the image.
PixelFeatures extract_features(const RgbImage& image);

struct Metrics {
  double mean_iou = 0.0;
  std::vector<double> per_class_iou;  // NaN for classes absent from gt
  double precision = 1.0;
  bool precision_vacuous = false;
  double energy = 0.0;
};

/// Accumulates intersection/union and labeled-correct counts across images so
/// corpus metrics pool pixels instead of averaging per-image scores.
class SegmentationScorer {
 public:
  explicit SegmentationScorer(int num_classes);

  /// Throws on dimension mismatch or when gt contains kUnknown.
  void add(const LabelGrid& pred, const LabelGrid& gt);
  Metrics result() const;

 private:
  int num_classes_;
  std::vector<std::uint64_t> intersection_;
  std::vector<std::uint64_t> union_;
  std::vector<std::uint64_t> gt_count_;
  std::uint64_t labeled_ = 0;
  std::uint64_t correct_ = 0;
};

/// mIoU over classes present in gt. kUnknown predictions are wrong for every
/// class. Also fills precision.
Metrics mean_iou(const LabelGrid& pred, const LabelGrid& gt);

/// Fraction of labeled predictions that match gt; 1.0 when nothing is labeled.
double precision(const LabelGrid& pred, const LabelGrid& gt);

}  // namespace wsseg
