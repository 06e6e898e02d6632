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

#include "wsseg/energy.hpp"

#include <cmath>

#include "wsseg/error.hpp"

namespace wsseg {
namespace {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_shape(const AffinityGraph& graph, const ProbGrid& alpha) {
  if (graph.width != alpha.width() || graph.height != alpha.height()) {
    throw Error("energy: graph and probability grid cover different pixels");
  }
  if (graph.right.size() != graph.vertex_count() || graph.down.size() != graph.vertex_count()) {
    throw Error("energy: malformed graph");
  }
}

double mean_over_groups(const AffinityField& gates, ScanDirection d, std::size_t pixel) {
  double s = 0.0;
  for (int k = 0; k < kGateGroups; ++k) s += gates.gate(gate_field(d, k), pixel);
  return s / kGateGroups;
}

}  // namespace

AffinityGraph::AffinityGraph(int w, int h, double fill) : width(w), height(h) {
  const std::size_t n = vertex_count();
  right.assign(n, 0.0);
  down.assign(n, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) right[i] = fill;
      if (y + 1 < h) down[i] = fill;
    }
  }
}

double AffinityGraph::degree(std::size_t i) const {
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t x = i % w;
  const std::size_t y = i / w;
  double d = right[i] + down[i];
  if (x > 0) d += right[i - 1];
  if (y > 0) d += down[i - w];
  return d;
}

void AffinityGraph::validate() const {
  if (right.size() != vertex_count() || down.size() != vertex_count()) {
    throw Error("graph: weight arrays have the wrong size");
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      for (double v : {right[i], down[i]}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("graph: weights must be finite and >= 0");
      }
      if ((x + 1 == width && right[i] != 0.0) || (y + 1 == height && down[i] != 0.0)) {
        throw Error("graph: border edge carries weight");
      }
    }
  }
}

AffinityGraph graph_from_gates(const AffinityField& gates) {
  const int w = gates.width;
  const int h = gates.height;
  AffinityGraph graph(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) {
        const double forward = mean_over_groups(gates, ScanDirection::kLeftToRight, i + 1);
        const double backward = mean_over_groups(gates, ScanDirection::kRightToLeft, i);
        graph.right[i] = std::max(0.0, 0.5 * (forward + backward));
      }
      if (y + 1 < h) {
        const std::size_t below = i + static_cast<std::size_t>(w);
        const double forward = mean_over_groups(gates, ScanDirection::kTopToBottom, below);
        const double backward = mean_over_groups(gates, ScanDirection::kBottomToTop, i);
        graph.down[i] = std::max(0.0, 0.5 * (forward + backward));
      }
    }
  }
  return graph;
}

double laplacian_bilinear(const AffinityGraph& graph, const ProbGrid& a, const ProbGrid& b) {
  check_shape(graph, a);
  if (!a.same_shape(b)) throw Error("energy: operands disagree in shape");
  const int c_count = a.num_classes();
  const std::size_t w = static_cast<std::size_t>(graph.width);
  CompensatedSum sum;
  auto edge = [&](std::size_t i, std::size_t j, double weight) {
    if (weight == 0.0) return;
    double s = 0.0;
    for (int c = 0; c < c_count; ++c) s += (a.at(i, c) - a.at(j, c)) * (b.at(i, c) - b.at(j, c));
    sum.add(weight * s);
  };
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    if (i % w + 1 < w) edge(i, i + 1, graph.right[i]);
    if (i + w < graph.vertex_count()) edge(i, i + w, graph.down[i]);
  }
  return sum.value();
}

double laplacian_quadratic(const AffinityGraph& graph, const ProbGrid& alpha) {
  return laplacian_bilinear(graph, alpha, alpha);
}

std::vector<double> energy_gradient(const AffinityGraph& graph, const ProbGrid& alpha) {
  check_shape(graph, alpha);
  const int c_count = alpha.num_classes();
  const std::size_t w = static_cast<std::size_t>(graph.width);
  std::vector<double> grad(alpha.data().size(), 0.0);
  auto edge = [&](std::size_t i, std::size_t j, double weight) {
    for (int c = 0; c < c_count; ++c) {
      const double diff = 2.0 * weight * (alpha.at(i, c) - alpha.at(j, c));
      grad[i * c_count + c] += diff;
      grad[j * c_count + c] -= diff;
    }
  };
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    if (i % w + 1 < w) edge(i, i + 1, graph.right[i]);
    if (i + w < graph.vertex_count()) edge(i, i + w, graph.down[i]);
  }
  return grad;
}

double normalized_energy(const AffinityGraph& graph, const ProbGrid& alpha) {
  return laplacian_quadratic(graph, alpha) /
         (static_cast<double>(alpha.pixel_count()) * alpha.num_classes());
}

MiningInequality mining_inequality_holds(const AffinityGraph& graph, const LabelGrid& mined,
                                         const ProbGrid& alpha_u) {
  if (mined.width() != alpha_u.width() || mined.height() != alpha_u.height()) {
    throw Error("mining inequality: shape mismatch");
  }
  const ProbGrid y = ProbGrid::one_hot(mined, &alpha_u);
  MiningInequality r;
  r.mined_form = laplacian_bilinear(graph, y, alpha_u);
  r.unary_form = laplacian_quadratic(graph, alpha_u);
  r.holds = r.mined_form <= r.unary_form;
  return r;
}

}  // namespace wsseg
