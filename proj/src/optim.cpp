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

#include "wsseg/optim.hpp"

#include <algorithm>
#include <cmath>

#include "wsseg/error.hpp"
#include "wsseg/grid.hpp"

namespace wsseg {

void InputScaling::apply(const double* in, double* out, int dim) const {
  if (identity()) {
    std::copy(in, in + dim, out);
    return;
  }
  for (int k = 0; k < dim; ++k) out[k] = (in[k] - mean[static_cast<std::size_t>(k)]) / scale[static_cast<std::size_t>(k)];
}

ScalingAccumulator::ScalingAccumulator(int dim)
    : dim_(dim), sum_(static_cast<std::size_t>(dim), 0.0), sum_sq_(static_cast<std::size_t>(dim), 0.0) {}

void ScalingAccumulator::add(const double* row) {
  for (int k = 0; k < dim_; ++k) {
    sum_[static_cast<std::size_t>(k)] += row[k];
    sum_sq_[static_cast<std::size_t>(k)] += row[k] * row[k];
  }
  ++count_;
}

InputScaling ScalingAccumulator::finish() const {
  if (count_ == 0) return {};
  InputScaling out;
  const double n = static_cast<double>(count_);
  for (int k = 0; k < dim_; ++k) {
    const double m = sum_[static_cast<std::size_t>(k)] / n;
    const double var = std::max(0.0, sum_sq_[static_cast<std::size_t>(k)] / n - m * m);
    const double sd = std::sqrt(var);
    out.mean.push_back(m);
    out.scale.push_back(sd < 1e-8 ? 1.0 : sd);
  }
  return out;
}

DescentResult gradient_descent(std::vector<double> params, const Objective& objective,
                               const DescentConfig& config, const std::string& stage) {
  if (config.steps < 0 || config.steps > config.schedule.max_iter) {
    throw Error(stage + ": steps must lie in [0, schedule.max_iter]");
  }
  DescentResult result;
  result.loss_history.reserve(static_cast<std::size_t>(config.steps) + 1);
  std::vector<double> grad(params.size());
  std::vector<double> velocity(params.size(), 0.0);

  auto evaluate = [&](int k) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss = objective(params, grad);
    if (!std::isfinite(loss)) throw DivergenceError(stage, k, "loss is not finite");
    for (double g : grad) {
      if (!std::isfinite(g)) throw DivergenceError(stage, k, "gradient is not finite");
    }
    result.loss_history.push_back(loss);
  };

  for (int k = 0; k < config.steps; ++k) {
    evaluate(k);
    const double lr = config.lr_gain * lr_at(config.schedule, k);
    for (std::size_t j = 0; j < params.size(); ++j) {
      velocity[j] = config.momentum * velocity[j] - lr * grad[j];
      params[j] += velocity[j];
    }
  }
  evaluate(config.steps);
  result.params = std::move(params);
  return result;
}

namespace detail {

void softmax_probs(std::span<const double> params, int num_classes, int dim, const double* row,
                   double* out) {
  const int stride = dim + 1;
  double peak = -INFINITY;
  for (int c = 0; c < num_classes; ++c) {
    const double* w = params.data() + c * stride;
    double z = w[dim];
    for (int d = 0; d < dim; ++d) z += w[d] * row[d];
    out[c] = z;
    peak = std::max(peak, z);
  }
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    out[c] = std::exp(out[c] - peak);
    sum += out[c];
  }
  for (int c = 0; c < num_classes; ++c) out[c] /= sum;
}

double softmax_xent_sum(std::span<const double> params, int num_classes, int dim,
                        std::span<const double> rows, std::span<const unsigned char> labels,
                        std::span<double> grad, std::size_t& labeled) {
  const int stride = dim + 1;
  std::vector<double> prob(static_cast<std::size_t>(num_classes));
  double loss = 0.0;
  labeled = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const unsigned char y = labels[i];
    if (y == kUnknown) continue;
    ++labeled;
    const double* x = rows.data() + i * static_cast<std::size_t>(dim);
    softmax_probs(params, num_classes, dim, x, prob.data());
    loss -= std::log(std::max(prob[y], 1e-300));
    if (grad.empty()) continue;
    for (int c = 0; c < num_classes; ++c) {
      const double delta = prob[c] - (c == y ? 1.0 : 0.0);
      double* g = grad.data() + c * stride;
      for (int d = 0; d < dim; ++d) g[d] += delta * x[d];
      g[dim] += delta;
    }
  }
  return loss;
}

}  // namespace detail
}  // namespace wsseg
