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

#include <array>
#include <span>
#include <vector>

#include "wsseg/grid.hpp"
#include "wsseg/optim.hpp"
#include "wsseg/superpixel.hpp"

namespace wsseg {

/// Mean RGB, RGB standard deviation, normalized centroid (x, y), and region
/// size as a fraction of the image.
inline constexpr int kRegionFeatureDim = 9;

struct RegionFeatureTable {
  int region_count = 0;
  std::vector<double> rows;  // region-major, kRegionFeatureDim per region

  std::span<const double> row(int r) const {
    return {rows.data() + static_cast<std::size_t>(r) * kRegionFeatureDim, kRegionFeatureDim};
  }
};

RegionFeatureTable region_features(const RgbImage& image, const SuperpixelMap& sp);

/// Training set for the region classifier: feature rows with their voted class.
struct RegionDataset {
  int num_classes = 0;
  std::vector<double> rows;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  void append(const RegionDataset& other);
};

/// Regions whose unary labels pass the strict majority vote become samples;
/// the rest are left out. Throws when no region qualifies.
RegionDataset build_region_dataset(const SuperpixelMap& sp, const RegionFeatureTable& features,
                                   const LabelGrid& unary_labels, double majority = 0.8);

/// Linear-softmax region classifier over standardized region features. The
/// standardization statistics are part of the model.
struct RegionParams {
  int num_classes = 0;
  std::array<double, kRegionFeatureDim> feature_mean{};
  std::array<double, kRegionFeatureDim> feature_scale{};
  std::vector<double> values;  // per class: kRegionFeatureDim weights, then a bias

  static RegionParams zeros(int num_classes);
};

/// Mean cross-entropy over the dataset under the standardization stored in
/// `params`; fills `grad` (same layout as params.values) when non-empty.
double region_objective(const RegionParams& params, const RegionDataset& dataset,
                        std::span<double> grad = {});

struct RegionTrainResult {
  RegionParams params;
  std::vector<double> loss_history;
};

/// Trains from zero weights on the pooled dataset. Throws on an empty dataset.
RegionTrainResult train_region_classifier(const RegionDataset& dataset,
                                          const DescentConfig& config);

/// Per-region class scores (each row sums to one), predicted class, and max score.
struct RegionConfidence {
  int num_classes = 0;
  std::vector<double> scores;  // region-major
  std::vector<Label> predicted;
  std::vector<double> max_score;
};

RegionConfidence score_regions(const RegionParams& params, const RegionFeatureTable& features);

/// Regions whose max score is strictly above `threshold` take their predicted
/// class; every other pixel is kUnknown. Throws unless threshold is in (1/C, 1).
LabelGrid mine_confident(const SuperpixelMap& sp, const RegionConfidence& confidence,
                         double threshold);

LabelGrid mine_confident(const SuperpixelMap& sp, const RegionParams& params,
                         const RegionFeatureTable& features, double threshold);

}  // namespace wsseg
