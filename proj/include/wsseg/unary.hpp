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

#include <span>
#include <vector>

#include "wsseg/grid.hpp"
#include "wsseg/optim.hpp"

namespace wsseg {

/// Linear-softmax pixel classifier. `values` holds, per class, kFeatureDim
/// weights followed by a bias. Features pass through `scaling` first.
struct UnaryParams {
  int num_classes = 0;
  std::vector<double> values;
  InputScaling scaling;

  static UnaryParams zeros(int num_classes) {
    return {num_classes,
            std::vector<double>(static_cast<std::size_t>(num_classes) * (kFeatureDim + 1), 0.0), {}};
  }
  double& weight(int c, int d) { return values[static_cast<std::size_t>(c * (kFeatureDim + 1) + d)]; }
  double& bias(int c) { return values[static_cast<std::size_t>(c * (kFeatureDim + 1) + kFeatureDim)]; }
};

/// Throws on non-finite parameters.
ProbGrid predict(const UnaryParams& params, const PixelFeatures& features);

/// Soft targets become hard labels; tied maxima become kUnknown.
LabelGrid harden(const ProbGrid& target);

/// One image worth of training data; kUnknown pixels are ignored.
struct LabeledPixels {
  const PixelFeatures* features;
  const LabelGrid* labels;
};

/// Standardization fitted on every pixel of every image in `data`.
InputScaling fit_unary_scaling(std::span<const LabeledPixels> data);

/// Mean cross-entropy over every labeled pixel of every image. Writes the
/// gradient when `grad` is non-empty. Returns 0 when nothing is labeled.
double unary_objective(const UnaryParams& params, std::span<const LabeledPixels> data,
                       std::span<double> grad = {});

struct UnaryTrainResult {
  UnaryParams params;
  std::vector<double> loss_history;
};

/// Full-batch descent from `init`; the scaling of `init` is kept. Throws Error when no pixel is labeled and
/// DivergenceError on a non-finite loss.
UnaryTrainResult train_unary(const UnaryParams& init, std::span<const LabeledPixels> data,
                             const DescentConfig& config);

}  // namespace wsseg
