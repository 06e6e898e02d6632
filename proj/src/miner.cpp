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

#include "wsseg/miner.hpp"

#include <algorithm>
#include <cmath>

#include "wsseg/error.hpp"

namespace wsseg {

RegionFeatureTable region_features(const RgbImage& image, const SuperpixelMap& sp) {
  if (image.width != sp.width || image.height != sp.height) {
    throw Error("region_features: image and superpixels disagree in size");
  }
  RegionFeatureTable table;
  table.region_count = sp.region_count;
  table.rows.assign(static_cast<std::size_t>(sp.region_count) * kRegionFeatureDim, 0.0);
  const double n = static_cast<double>(image.pixel_count());
  const double xs = image.width > 1 ? image.width - 1 : 1;
  const double ys = image.height > 1 ? image.height - 1 : 1;
  for (int r = 0; r < sp.region_count; ++r) {
    const auto& pixels = sp.pixels[static_cast<std::size_t>(r)];
    const double size = static_cast<double>(pixels.size());
    double* row = table.rows.data() + static_cast<std::size_t>(r) * kRegionFeatureDim;
    double sum[3] = {0, 0, 0};
    double sq[3] = {0, 0, 0};
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t p : pixels) {
      for (int ch = 0; ch < 3; ++ch) {
        const double v = image.at(p, ch);
        sum[ch] += v;
        sq[ch] += v * v;
      }
      cx += static_cast<double>(p % static_cast<std::size_t>(image.width));
      cy += static_cast<double>(p / static_cast<std::size_t>(image.width));
    }
    for (int ch = 0; ch < 3; ++ch) {
      const double mean = sum[ch] / size;
      row[ch] = mean;
      row[3 + ch] = std::sqrt(std::max(0.0, sq[ch] / size - mean * mean));
    }
    row[6] = cx / size / xs;
    row[7] = cy / size / ys;
    row[8] = size / n;
  }
  return table;
}

void RegionDataset::append(const RegionDataset& other) {
  if (num_classes == 0) num_classes = other.num_classes;
  if (other.num_classes != num_classes) throw Error("region dataset: class count mismatch");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

RegionDataset build_region_dataset(const SuperpixelMap& sp, const RegionFeatureTable& features,
                                   const LabelGrid& unary_labels, double majority) {
  if (features.region_count != sp.region_count) {
    throw Error("build_region_dataset: feature table does not match superpixels");
  }
  const auto votes = region_label_vote(sp, unary_labels, majority);
  RegionDataset ds;
  ds.num_classes = unary_labels.num_classes();
  for (int r = 0; r < sp.region_count; ++r) {
    const Label v = votes[static_cast<std::size_t>(r)];
    if (v == kUnknown) continue;
    const auto row = features.row(r);
    ds.rows.insert(ds.rows.end(), row.begin(), row.end());
    ds.labels.push_back(v);
  }
  if (ds.labels.empty()) throw Error("build_region_dataset: no region passes the vote");
  return ds;
}

RegionParams RegionParams::zeros(int num_classes) {
  RegionParams p;
  p.num_classes = num_classes;
  p.feature_mean.fill(0.0);
  p.feature_scale.fill(1.0);
  p.values.assign(static_cast<std::size_t>(num_classes) * (kRegionFeatureDim + 1), 0.0);
  return p;
}

namespace {

std::vector<double> standardize(const RegionParams& params, std::span<const double> rows) {
  std::vector<double> out(rows.begin(), rows.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t d = i % kRegionFeatureDim;
    out[i] = (out[i] - params.feature_mean[d]) / params.feature_scale[d];
  }
  return out;
}

double mean_xent(std::span<const double> values, const RegionDataset& dataset,
                 std::span<const double> standardized, std::span<double> grad) {
  const double count = static_cast<double>(dataset.size());
  std::size_t labeled = 0;
  const double loss = detail::softmax_xent_sum(values, dataset.num_classes, kRegionFeatureDim,
                                               standardized, dataset.labels, grad, labeled);
  for (double& v : grad) v /= count;
  return loss / count;
}

}  // namespace

double region_objective(const RegionParams& params, const RegionDataset& dataset,
                        std::span<double> grad) {
  if (dataset.size() == 0) throw Error("region classifier: empty dataset");
  if (params.num_classes != dataset.num_classes ||
      params.values.size() !=
          static_cast<std::size_t>(params.num_classes) * (kRegionFeatureDim + 1)) {
    throw Error("region classifier: parameters do not match the dataset");
  }
  if (!grad.empty() && grad.size() != params.values.size()) {
    throw Error("region classifier: gradient buffer has the wrong size");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  return mean_xent(params.values, dataset, standardize(params, dataset.rows), grad);
}

RegionTrainResult train_region_classifier(const RegionDataset& dataset,
                                          const DescentConfig& config) {
  if (dataset.size() == 0) throw Error("region classifier: empty dataset");
  RegionParams params = RegionParams::zeros(dataset.num_classes);
  const double count = static_cast<double>(dataset.size());
  for (int d = 0; d < kRegionFeatureDim; ++d) {
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const double v = dataset.rows[i * kRegionFeatureDim + static_cast<std::size_t>(d)];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / count;
    const double sd = std::sqrt(std::max(0.0, sq / count - mean * mean));
    params.feature_mean[static_cast<std::size_t>(d)] = mean;
    params.feature_scale[static_cast<std::size_t>(d)] = sd > 1e-6 ? sd : 1.0;
  }
  const std::vector<double> rows = standardize(params, dataset.rows);
  auto objective = [&](std::span<const double> p, std::span<double> g) {
    return mean_xent(p, dataset, rows, g);
  };
  auto result = gradient_descent(params.values, objective, config, "region classifier");
  params.values = std::move(result.params);
  return {std::move(params), std::move(result.loss_history)};
}

RegionConfidence score_regions(const RegionParams& params, const RegionFeatureTable& features) {
  if (params.values.size() !=
      static_cast<std::size_t>(params.num_classes) * (kRegionFeatureDim + 1)) {
    throw Error("score_regions: malformed parameters");
  }
  RegionConfidence conf;
  conf.num_classes = params.num_classes;
  conf.scores.assign(static_cast<std::size_t>(features.region_count) * params.num_classes, 0.0);
  conf.predicted.assign(static_cast<std::size_t>(features.region_count), 0);
  conf.max_score.assign(static_cast<std::size_t>(features.region_count), 0.0);
  const std::vector<double> rows = standardize(params, features.rows);
  for (int r = 0; r < features.region_count; ++r) {
    double* s = conf.scores.data() + static_cast<std::size_t>(r) * params.num_classes;
    detail::softmax_probs(params.values, params.num_classes, kRegionFeatureDim,
                          rows.data() + static_cast<std::size_t>(r) * kRegionFeatureDim, s);
    const auto best = std::max_element(s, s + params.num_classes) - s;
    conf.predicted[static_cast<std::size_t>(r)] = static_cast<Label>(best);
    conf.max_score[static_cast<std::size_t>(r)] = s[best];
  }
  return conf;
}

LabelGrid mine_confident(const SuperpixelMap& sp, const RegionConfidence& confidence,
                         double threshold) {
  const int c_count = confidence.num_classes;
  if (!(threshold > 1.0 / c_count && threshold < 1.0)) {
    throw Error("mine_confident: threshold must lie in (1/C, 1)");
  }
  if (confidence.predicted.size() != static_cast<std::size_t>(sp.region_count)) {
    throw Error("mine_confident: one score per region required");
  }
  std::vector<Label> region_labels(static_cast<std::size_t>(sp.region_count), kUnknown);
  for (std::size_t r = 0; r < region_labels.size(); ++r) {
    if (confidence.max_score[r] > threshold) region_labels[r] = confidence.predicted[r];
  }
  return paint_regions(sp, region_labels, c_count);
}

LabelGrid mine_confident(const SuperpixelMap& sp, const RegionParams& params,
                         const RegionFeatureTable& features, double threshold) {
  return mine_confident(sp, score_regions(params, features), threshold);
}

}  // namespace wsseg
