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

#include "wsseg/unary.hpp"

#include <algorithm>
#include <cmath>

#include "wsseg/error.hpp"

namespace wsseg {
namespace {

void check_params(const UnaryParams& params) {
  if (params.num_classes < 1 ||
      params.values.size() != static_cast<std::size_t>(params.num_classes) * (kFeatureDim + 1)) {
    throw Error("unary: parameter vector has the wrong size");
  }
  if (!std::all_of(params.values.begin(), params.values.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw Error("unary: non-finite parameters");
  }
  if (!params.scaling.identity() && (params.scaling.mean.size() != kFeatureDim ||
                                     params.scaling.scale.size() != kFeatureDim)) {
    throw Error("unary: feature scaling has the wrong size");
  }
}

std::vector<double> scaled_rows(const InputScaling& scaling, const PixelFeatures& features) {
  std::vector<double> out(features.data.size());
  for (std::size_t i = 0; i < features.pixel_count(); ++i) {
    scaling.apply(features.data.data() + i * kFeatureDim, out.data() + i * kFeatureDim, kFeatureDim);
  }
  return out;
}

void check_sizes(const LabeledPixels& item) {
  if (item.features->width != item.labels->width() ||
      item.features->height != item.labels->height()) {
    throw Error("unary: features and labels disagree in size");
  }
}

// Pooled mean cross-entropy over already scaled rows.
double pooled_xent(std::span<const double> values, int num_classes,
                   std::span<const std::vector<double>> rows, std::span<const LabeledPixels> data,
                   std::span<double> grad) {
  double loss = 0.0;
  std::size_t labeled = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::size_t count = 0;
    loss += detail::softmax_xent_sum(values, num_classes, kFeatureDim, rows[k],
                                     data[k].labels->values(), grad, count);
    labeled += count;
  }
  if (labeled == 0) return 0.0;
  const double scale = 1.0 / static_cast<double>(labeled);
  for (double& g : grad) g *= scale;
  return loss * scale;
}

}  // namespace

ProbGrid predict(const UnaryParams& params, const PixelFeatures& features) {
  check_params(params);
  ProbGrid out(features.width, features.height, params.num_classes);
  const std::size_t n = features.pixel_count();
  double row[kFeatureDim];
  for (std::size_t i = 0; i < n; ++i) {
    params.scaling.apply(features.data.data() + i * kFeatureDim, row, kFeatureDim);
    detail::softmax_probs(params.values, params.num_classes, kFeatureDim, row,
                          out.pixel(i).data());
  }
  return out;
}

LabelGrid harden(const ProbGrid& target) { return target.argmax(/*ties_unknown=*/true); }

InputScaling fit_unary_scaling(std::span<const LabeledPixels> data) {
  ScalingAccumulator acc(kFeatureDim);
  for (const auto& item : data) {
    for (std::size_t i = 0; i < item.features->pixel_count(); ++i) {
      acc.add(item.features->data.data() + i * kFeatureDim);
    }
  }
  return acc.finish();
}

double unary_objective(const UnaryParams& params, std::span<const LabeledPixels> data,
                       std::span<double> grad) {
  check_params(params);
  if (!grad.empty() && grad.size() != params.values.size()) {
    throw Error("unary: gradient buffer has the wrong size");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(data.size());
  for (const auto& item : data) {
    check_sizes(item);
    rows.push_back(scaled_rows(params.scaling, *item.features));
  }
  return pooled_xent(params.values, params.num_classes, rows, data, grad);
}

UnaryTrainResult train_unary(const UnaryParams& init, std::span<const LabeledPixels> data,
                             const DescentConfig& config) {
  check_params(init);
  std::size_t labeled = 0;
  std::vector<std::vector<double>> rows;
  rows.reserve(data.size());
  for (const auto& item : data) {
    check_sizes(item);
    labeled += item.labels->labeled_count();
    rows.push_back(scaled_rows(init.scaling, *item.features));
  }
  if (labeled == 0) throw Error("unary: no labeled pixels to train on");

  const int num_classes = init.num_classes;
  auto objective = [&](std::span<const double> p, std::span<double> g) {
    return pooled_xent(p, num_classes, rows, data, g);
  };
  auto result = gradient_descent(init.values, objective, config, "unary");
  return {{num_classes, std::move(result.params), init.scaling}, std::move(result.loss_history)};
}

}  // namespace wsseg
