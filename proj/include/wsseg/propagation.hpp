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
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wsseg/grid.hpp"
#include "wsseg/optim.hpp"
#include "wsseg/superpixel.hpp"

namespace wsseg {

enum class ScanDirection : int {
  kLeftToRight = 0,
  kRightToLeft = 1,
  kTopToBottom = 2,
  kBottomToTop = 3,
};

inline constexpr int kScanDirections = 4;
inline constexpr int kGateGroups = 3;
inline constexpr int kGateFields = kScanDirections * kGateGroups;
inline constexpr int kGateInputDim = 2 * kFeatureDim;
inline constexpr double kGateEpsilon = 1e-3;
inline constexpr double kGateMax = 1.0 - kGateEpsilon;

constexpr int gate_field(ScanDirection d, int group) {
  return static_cast<int>(d) * kGateGroups + group;
}
/// Probability channels are dealt round-robin onto the three gate groups.
constexpr int channel_group(int channel) { return channel % kGateGroups; }

const char* direction_name(ScanDirection d);

/// One scan line: `length` pixels starting at `start`, advancing by `stride`.
struct ScanLine {
  std::ptrdiff_t start;
  std::ptrdiff_t stride;
  int length;
};

/// All scan lines of a width x height grid in direction `d`.
std::vector<ScanLine> scan_lines(int width, int height, ScanDirection d);

/// The pixel visited just before (x, y) in direction `d`; (x, y) itself at a
/// line start.
std::size_t scan_predecessor(int width, int height, int x, int y, ScanDirection d);

/// Gate weights of the four directional recurrences, one field per
/// (direction, gate group). Every gate lies in [0, 1).
struct AffinityField {
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, kGateFields> gates;

  AffinityField() = default;
  AffinityField(int w, int h, double fill = 0.0);

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  double gate(int field, std::size_t pixel) const {
    return gates[static_cast<std::size_t>(field)][pixel];
  }
};

/// Gate model: per field, a linear map of the 16-dim pair input followed by
/// g = (1 - eps) * sigmoid(z). `values` holds, per field, kGateInputDim
/// weights and then a bias.
struct PairwiseParams {
  std::vector<double> values;
  /// Standardization of the pair input, applied before the linear model.
  InputScaling scaling;

  static PairwiseParams zeros() {
    return {std::vector<double>(static_cast<std::size_t>(kGateFields) * (kGateInputDim + 1), 0.0), {}};
  }
  static std::string value_name(std::size_t index);
};

/// Pair input for a pixel and its scan predecessor: the pixel's own features
/// followed by the element-wise absolute feature difference.
void gate_input(const PixelFeatures& features, std::size_t pixel, std::size_t predecessor,
                double* out);

/// Throws on non-finite parameters.
/// Standardization fitted on the pair inputs of every pixel, direction and
/// image.
InputScaling fit_gate_scaling(std::span<const PixelFeatures* const> features);

AffinityField compute_gates(const PairwiseParams& params, const PixelFeatures& features);

/// Mean of the four directional scans, before per-pixel renormalization.
/// Channel c of direction d uses gate field gate_field(d, channel_group(c)).
ProbGrid propagate_unnormalized(const AffinityField& gates, const ProbGrid& alpha_u);

/// Scan-line recurrence h_i = (1 - g_i) x_i + g_i h_prev in each direction,
/// averaged and renormalized per pixel. Throws on a gate outside [0, 1).
ProbGrid propagate(const AffinityField& gates, const ProbGrid& alpha_u);

struct LossValue {
  double value = 0.0;
  bool vacuous = false;
};

/// Mean -log alpha_p[y] over labeled pixels; vacuous (0) when none is labeled.
LossValue affinity_loss(const ProbGrid& alpha_p, const LabelGrid& labels);

/// Mean over the 12 fields and all pixels of the squared deviation of a gate
/// from the mean of its field over the pixel's superpixel.
double smoothness_loss(const AffinityField& gates, const SuperpixelMap& sp);

struct PairwiseSample {
  const PixelFeatures* features;
  const ProbGrid* alpha_u;
  const LabelGrid* labels;
  const SuperpixelMap* superpixels;
};

struct PairwiseLoss {
  double total = 0.0;
  double affinity = 0.0;
  double smoothness = 0.0;
  bool vacuous = false;
};

/// Corpus objective L_a + lambda * L_s, pooled over every labeled pixel
/// (L_a) and every pixel (L_s). The gradient is backpropagated through the
/// scan recurrences and written into `grad` when non-empty.
PairwiseLoss pairwise_objective(const PairwiseParams& params,
                                std::span<const PairwiseSample> samples, double lambda_smooth,
                                std::span<double> grad = {});

struct PairwiseTrainConfig {
  DescentConfig descent;
  double lambda_smooth = 0.1;
};

struct PairwiseTrainResult {
  PairwiseParams params;
  std::vector<double> loss_history;
};

/// Full-batch descent on pairwise_objective. With no labeled pixel anywhere
/// the parameters are returned unchanged.
PairwiseTrainResult train_pairwise(const PairwiseParams& init,
                                   std::span<const PairwiseSample> samples,
                                   const PairwiseTrainConfig& config);

}  // namespace wsseg
