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

#include "wsseg/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wsseg/error.hpp"

namespace wsseg {
namespace {

constexpr std::size_t kParamStride = kGateInputDim + 1;

double squash(double z) {
  const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return kGateMax * s;
}

void check_params(const PairwiseParams& params) {
  if (params.values.size() != kGateFields * kParamStride) {
    throw Error("pairwise: parameter vector has the wrong size");
  }
  if (!std::all_of(params.values.begin(), params.values.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw Error("pairwise: non-finite parameters");
  }
  if (!params.scaling.identity() && (params.scaling.mean.size() != kGateInputDim ||
                                     params.scaling.scale.size() != kGateInputDim)) {
    throw Error("pairwise: input scaling has the wrong size");
  }
}

// Folds the input standardization into the linear model so the per-pixel
// work runs on raw pair inputs: per field, kGateInputDim weights and a bias.
std::vector<double> effective_weights(const PairwiseParams& params) {
  std::vector<double> out = params.values;
  if (params.scaling.identity()) return out;
  for (int f = 0; f < kGateFields; ++f) {
    double* p = out.data() + static_cast<std::size_t>(f) * kParamStride;
    for (int j = 0; j < kGateInputDim; ++j) {
      p[j] /= params.scaling.scale[static_cast<std::size_t>(j)];
      p[kGateInputDim] -= p[j] * params.scaling.mean[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void check_shapes(const AffinityField& gates, const ProbGrid& alpha) {
  if (gates.width != alpha.width() || gates.height != alpha.height()) {
    throw Error("propagate: gate field and probability grid disagree in size");
  }
}

// States of the four directional scans, direction-major, each N x C.
void scan_forward(const AffinityField& gates, const ProbGrid& x, std::vector<double>& states) {
  const int c_count = x.num_classes();
  const std::size_t block = x.pixel_count() * static_cast<std::size_t>(c_count);
  states.resize(block * kScanDirections);
  const auto in = x.data();
  for (int d = 0; d < kScanDirections; ++d) {
    double* h = states.data() + block * static_cast<std::size_t>(d);
    const double* g[kGateGroups];
    for (int k = 0; k < kGateGroups; ++k) {
      g[k] = gates.gates[static_cast<std::size_t>(gate_field(static_cast<ScanDirection>(d), k))].data();
    }
    for (const ScanLine& line : scan_lines(x.width(), x.height(), static_cast<ScanDirection>(d))) {
      std::ptrdiff_t i = line.start;
      for (int c = 0; c < c_count; ++c) h[i * c_count + c] = in[i * c_count + c];
      for (int step = 1; step < line.length; ++step) {
        const std::ptrdiff_t prev = i;
        i += line.stride;
        for (int c = 0; c < c_count; ++c) {
          const double w = g[channel_group(c)][i];
          h[i * c_count + c] = (1.0 - w) * in[i * c_count + c] + w * h[prev * c_count + c];
        }
      }
    }
  }
}

void average_directions(const std::vector<double>& states, ProbGrid& out) {
  auto dst = out.data();
  const std::size_t block = dst.size();
  for (std::size_t j = 0; j < block; ++j) {
    // paired sums keep equal states exact, so zero gates give back the input
    dst[j] = 0.25 * ((states[j] + states[block + j]) + (states[2 * block + j] + states[3 * block + j]));
  }
}

// Region means of one gate field.
void region_means(const std::vector<double>& field, const SuperpixelMap& sp,
                  std::vector<double>& means) {
  means.assign(static_cast<std::size_t>(sp.region_count), 0.0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    means[static_cast<std::size_t>(sp.region_id[i])] += field[i];
  }
  for (int r = 0; r < sp.region_count; ++r) {
    means[static_cast<std::size_t>(r)] /= static_cast<double>(sp.region_size(r));
  }
}

}  // namespace

const char* direction_name(ScanDirection d) {
  switch (d) {
    case ScanDirection::kLeftToRight: return "lr";
    case ScanDirection::kRightToLeft: return "rl";
    case ScanDirection::kTopToBottom: return "tb";
    case ScanDirection::kBottomToTop: return "bt";
  }
  return "?";
}

std::vector<ScanLine> scan_lines(int width, int height, ScanDirection d) {
  std::vector<ScanLine> lines;
  const std::ptrdiff_t w = width;
  switch (d) {
    case ScanDirection::kLeftToRight:
      for (int y = 0; y < height; ++y) lines.push_back({y * w, 1, width});
      break;
    case ScanDirection::kRightToLeft:
      for (int y = 0; y < height; ++y) lines.push_back({y * w + w - 1, -1, width});
      break;
    case ScanDirection::kTopToBottom:
      for (int x = 0; x < width; ++x) lines.push_back({x, w, height});
      break;
    case ScanDirection::kBottomToTop:
      for (int x = 0; x < width; ++x) lines.push_back({(height - 1) * w + x, -w, height});
      break;
  }
  return lines;
}

std::size_t scan_predecessor(int width, int height, int x, int y, ScanDirection d) {
  switch (d) {
    case ScanDirection::kLeftToRight: x = std::max(x - 1, 0); break;
    case ScanDirection::kRightToLeft: x = std::min(x + 1, width - 1); break;
    case ScanDirection::kTopToBottom: y = std::max(y - 1, 0); break;
    case ScanDirection::kBottomToTop: y = std::min(y + 1, height - 1); break;
  }
  return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
         static_cast<std::size_t>(x);
}

AffinityField::AffinityField(int w, int h, double fill) : width(w), height(h) {
  for (auto& field : gates) field.assign(pixel_count(), fill);
}

std::string PairwiseParams::value_name(std::size_t index) {
  const auto field = static_cast<int>(index / kParamStride);
  const auto slot = static_cast<int>(index % kParamStride);
  const auto d = static_cast<ScanDirection>(field / kGateGroups);
  char buf[48];
  if (slot == kGateInputDim) {
    std::snprintf(buf, sizeof(buf), "gate_%s_g%d_bias", direction_name(d), field % kGateGroups);
  } else {
    std::snprintf(buf, sizeof(buf), "gate_%s_g%d_w%02d", direction_name(d), field % kGateGroups,
                  slot);
  }
  return buf;
}

void gate_input(const PixelFeatures& features, std::size_t pixel, std::size_t predecessor,
                double* out) {
  const auto a = features.pixel(pixel);
  const auto b = features.pixel(predecessor);
  for (int k = 0; k < kFeatureDim; ++k) {
    out[k] = a[k];
    out[kFeatureDim + k] = std::abs(a[k] - b[k]);
  }
}

InputScaling fit_gate_scaling(std::span<const PixelFeatures* const> features) {
  ScalingAccumulator acc(kGateInputDim);
  double u[kGateInputDim];
  for (const PixelFeatures* f : features) {
    for (int y = 0; y < f->height; ++y) {
      for (int x = 0; x < f->width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * f->width + x;
        for (int d = 0; d < kScanDirections; ++d) {
          gate_input(*f, i, scan_predecessor(f->width, f->height, x, y, static_cast<ScanDirection>(d)), u);
          acc.add(u);
        }
      }
    }
  }
  return acc.finish();
}

AffinityField compute_gates(const PairwiseParams& params, const PixelFeatures& features) {
  check_params(params);
  const int w = features.width;
  const int h = features.height;
  AffinityField out(w, h);
  const std::vector<double> weights = effective_weights(params);
  double u[kGateInputDim];
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (int d = 0; d < kScanDirections; ++d) {
        const auto dir = static_cast<ScanDirection>(d);
        gate_input(features, i, scan_predecessor(w, h, x, y, dir), u);
        for (int k = 0; k < kGateGroups; ++k) {
          const int f = gate_field(dir, k);
          const double* p = weights.data() + static_cast<std::size_t>(f) * kParamStride;
          double z = p[kGateInputDim];
          for (int j = 0; j < kGateInputDim; ++j) z += p[j] * u[j];
          out.gates[static_cast<std::size_t>(f)][i] = squash(z);
        }
      }
    }
  }
  return out;
}

ProbGrid propagate_unnormalized(const AffinityField& gates, const ProbGrid& alpha_u) {
  check_shapes(gates, alpha_u);
  for (const auto& field : gates.gates) {
    for (double g : field) {
      if (!(g >= 0.0 && g < 1.0)) throw Error("propagate: gate outside [0, 1)");
    }
  }
  std::vector<double> states;
  scan_forward(gates, alpha_u, states);
  ProbGrid out(alpha_u.width(), alpha_u.height(), alpha_u.num_classes());
  average_directions(states, out);
  return out;
}

ProbGrid propagate(const AffinityField& gates, const ProbGrid& alpha_u) {
  ProbGrid out = propagate_unnormalized(gates, alpha_u);
  out.normalize();
  return out;
}

LossValue affinity_loss(const ProbGrid& alpha_p, const LabelGrid& labels) {
  if (alpha_p.width() != labels.width() || alpha_p.height() != labels.height()) {
    throw Error("affinity_loss: shape mismatch");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.is_unknown(i)) continue;
    sum -= std::log(std::max(alpha_p.at(i, labels[i]), 1e-300));
    ++count;
  }
  if (count == 0) return {0.0, true};
  return {sum / static_cast<double>(count), false};
}

double smoothness_loss(const AffinityField& gates, const SuperpixelMap& sp) {
  if (gates.width != sp.width || gates.height != sp.height) {
    throw Error("smoothness_loss: shape mismatch");
  }
  std::vector<double> means;
  double sum = 0.0;
  for (const auto& field : gates.gates) {
    region_means(field, sp, means);
    for (std::size_t i = 0; i < field.size(); ++i) {
      const double dev = field[i] - means[static_cast<std::size_t>(sp.region_id[i])];
      sum += dev * dev;
    }
  }
  return sum / (static_cast<double>(kGateFields) * static_cast<double>(gates.pixel_count()));
}

PairwiseLoss pairwise_objective(const PairwiseParams& params,
                                std::span<const PairwiseSample> samples, double lambda_smooth,
                                std::span<double> grad) {
  check_params(params);
  if (!grad.empty() && grad.size() != params.values.size()) {
    throw Error("pairwise: gradient buffer has the wrong size");
  }
  std::size_t labeled_total = 0;
  std::size_t pixels_total = 0;
  for (const auto& s : samples) {
    const ProbGrid& a = *s.alpha_u;
    if (s.features->width != a.width() || s.features->height != a.height() ||
        s.labels->width() != a.width() || s.labels->height() != a.height() ||
        s.superpixels->width != a.width() || s.superpixels->height != a.height()) {
      throw Error("pairwise: sample components disagree in size");
    }
    labeled_total += s.labels->labeled_count();
    pixels_total += a.pixel_count();
  }
  PairwiseLoss loss;
  loss.vacuous = labeled_total == 0;
  if (pixels_total == 0) return loss;

  const double inv_labeled = loss.vacuous ? 0.0 : 1.0 / static_cast<double>(labeled_total);
  const double smooth_scale =
      1.0 / (static_cast<double>(kGateFields) * static_cast<double>(pixels_total));
  const bool want_grad = !grad.empty();

  std::vector<double> states;
  std::vector<double> means;
  std::array<std::vector<double>, kGateFields> dgate;
  std::vector<double> draw;
  // Gradient with respect to the raw-input weights; mapped back through the
  // standardization once all samples are done.
  std::vector<double> raw_grad(want_grad ? params.values.size() : 0, 0.0);
  double affinity_sum = 0.0;
  double smooth_sum = 0.0;

  for (const auto& s : samples) {
    const ProbGrid& x = *s.alpha_u;
    const LabelGrid& y = *s.labels;
    const int c_count = x.num_classes();
    const std::size_t n = x.pixel_count();
    const AffinityField gates = compute_gates(params, *s.features);
    scan_forward(gates, x, states);
    const std::size_t block = n * static_cast<std::size_t>(c_count);

    if (want_grad) {
      for (auto& f : dgate) f.assign(n, 0.0);
      draw.assign(block, 0.0);
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (y.is_unknown(i)) continue;
      double total = 0.0;
      for (int c = 0; c < c_count; ++c) {
        const std::size_t j = i * c_count + c;
        total += 0.25 * ((states[j] + states[block + j]) + (states[2 * block + j] + states[3 * block + j]));
      }
      const std::size_t jy = i * c_count + y[i];
      const double raw_y =
          0.25 * ((states[jy] + states[block + jy]) + (states[2 * block + jy] + states[3 * block + jy]));
      affinity_sum -= std::log(std::max(raw_y, 1e-300) / total);
      if (want_grad) {
        for (int c = 0; c < c_count; ++c) draw[i * c_count + c] = inv_labeled / total;
        draw[jy] -= inv_labeled / std::max(raw_y, 1e-300);
      }
    }

    for (int f = 0; f < kGateFields; ++f) {
      const auto& field = gates.gates[static_cast<std::size_t>(f)];
      region_means(field, *s.superpixels, means);
      for (std::size_t i = 0; i < n; ++i) {
        const double dev = field[i] - means[static_cast<std::size_t>(s.superpixels->region_id[i])];
        smooth_sum += dev * dev;
        if (want_grad) dgate[static_cast<std::size_t>(f)][i] += lambda_smooth * 2.0 * smooth_scale * dev;
      }
    }
    if (!want_grad) continue;

    // Reverse-mode through each directional recurrence.
    const auto in = x.data();
    for (int d = 0; d < kScanDirections; ++d) {
      const auto dir = static_cast<ScanDirection>(d);
      const double* h = states.data() + block * static_cast<std::size_t>(d);
      const double* g[kGateGroups];
      double* dg[kGateGroups];
      for (int k = 0; k < kGateGroups; ++k) {
        const auto f = static_cast<std::size_t>(gate_field(dir, k));
        g[k] = gates.gates[f].data();
        dg[k] = dgate[f].data();
      }
      for (const ScanLine& line : scan_lines(x.width(), x.height(), dir)) {
        for (int c = 0; c < c_count; ++c) {
          const int k = channel_group(c);
          double carry = 0.0;
          std::ptrdiff_t i = line.start + static_cast<std::ptrdiff_t>(line.length - 1) * line.stride;
          for (int step = line.length - 1; step >= 1; --step) {
            const std::ptrdiff_t prev = i - line.stride;
            const double gh = 0.25 * draw[i * c_count + c] + carry;
            dg[k][i] += gh * (h[prev * c_count + c] - in[i * c_count + c]);
            carry = gh * g[k][i];
            i = prev;
          }
        }
      }
    }

    // Chain through the squashing function into the linear gate model.
    const int w = x.width();
    const int hgt = x.height();
    double u[kGateInputDim];
    for (int yy = 0; yy < hgt; ++yy) {
      for (int xx = 0; xx < w; ++xx) {
        const std::size_t i = static_cast<std::size_t>(yy) * w + xx;
        for (int d = 0; d < kScanDirections; ++d) {
          const auto dir = static_cast<ScanDirection>(d);
          bool loaded = false;
          for (int k = 0; k < kGateGroups; ++k) {
            const auto f = static_cast<std::size_t>(gate_field(dir, k));
            const double gv = gates.gates[f][i];
            const double dz = dgate[f][i] * gv * (1.0 - gv / kGateMax);
            if (dz == 0.0) continue;
            if (!loaded) {
              gate_input(*s.features, i, scan_predecessor(w, hgt, xx, yy, dir), u);
              loaded = true;
            }
            double* gp = raw_grad.data() + f * kParamStride;
            for (int j = 0; j < kGateInputDim; ++j) gp[j] += dz * u[j];
            gp[kGateInputDim] += dz;
          }
        }
      }
    }
  }

  if (want_grad) {
    const bool scaled = !params.scaling.identity();
    for (int f = 0; f < kGateFields; ++f) {
      const double* r = raw_grad.data() + static_cast<std::size_t>(f) * kParamStride;
      double* gp = grad.data() + static_cast<std::size_t>(f) * kParamStride;
      const double rb = r[kGateInputDim];
      for (int j = 0; j < kGateInputDim; ++j) {
        gp[j] += scaled ? (r[j] - params.scaling.mean[static_cast<std::size_t>(j)] * rb) /
                              params.scaling.scale[static_cast<std::size_t>(j)]
                        : r[j];
      }
      gp[kGateInputDim] += rb;
    }
  }
  loss.affinity = affinity_sum * inv_labeled;
  loss.smoothness = smooth_sum * smooth_scale;
  loss.total = loss.affinity + lambda_smooth * loss.smoothness;
  return loss;
}

PairwiseTrainResult train_pairwise(const PairwiseParams& init,
                                   std::span<const PairwiseSample> samples,
                                   const PairwiseTrainConfig& config) {
  check_params(init);
  std::size_t labeled = 0;
  for (const auto& s : samples) labeled += s.labels->labeled_count();
  if (labeled == 0) {
    const double l = pairwise_objective(init, samples, config.lambda_smooth).total;
    return {init, {l}};
  }
  auto objective = [&](std::span<const double> p, std::span<double> g) {
    PairwiseParams view{{p.begin(), p.end()}, init.scaling};
    return pairwise_objective(view, samples, config.lambda_smooth, g).total;
  };
  auto result = gradient_descent(init.values, objective, config.descent, "pairwise");
  return {{std::move(result.params), init.scaling}, std::move(result.loss_history)};
}

}  // namespace wsseg
