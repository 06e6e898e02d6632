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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wsseg/schedule.hpp"

namespace wsseg {

/// Full-batch gradient descent with heavy-ball momentum. The step size at
/// iteration k is lr_gain * lr_at(schedule, k).
struct DescentConfig {
  LrSchedule schedule;
  double lr_gain = 1.0;
  double momentum = 0.9;
  int steps = 500;
};

struct DescentResult {
  std::vector<double> params;
  /// Loss before every update followed by the loss of the returned params.
  std::vector<double> loss_history;
};

/// Writes the gradient into `grad` (same size as params) and returns the loss.
using Objective = std::function<double(std::span<const double> params, std::span<double> grad)>;

/// Throws DivergenceError tagged with `stage` on a non-finite loss or gradient.
DescentResult gradient_descent(std::vector<double> params, const Objective& objective,
                               const DescentConfig& config, const std::string& stage);

/// Per-dimension standardization (x - mean) / scale applied to model inputs.
/// Empty vectors mean the identity map.
struct InputScaling {
  std::vector<double> mean;
  std::vector<double> scale;

  bool identity() const { return mean.empty(); }
  void apply(const double* in, double* out, int dim) const;
};

/// Streams rows and produces their mean and standard deviation. Dimensions
/// whose deviation is below 1e-8 keep scale 1.
class ScalingAccumulator {
 public:
  explicit ScalingAccumulator(int dim);
  void add(const double* row);
  InputScaling finish() const;

 private:
  int dim_;
  std::size_t count_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

namespace detail {

/// Accumulates the summed cross-entropy of a linear-softmax model
/// (params laid out per class as D weights then a bias) over the rows whose
/// label is not kUnknown. Gradient sums are added into `grad` when non-empty.
/// Returns the number of labeled rows through `labeled`.
double softmax_xent_sum(std::span<const double> params, int num_classes, int dim,
                        std::span<const double> rows, std::span<const unsigned char> labels,
                        std::span<double> grad, std::size_t& labeled);

/// Class probabilities of one feature row.
void softmax_probs(std::span<const double> params, int num_classes, int dim, const double* row,
                   double* out);

}  // namespace detail
}  // namespace wsseg
