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

#include <vector>

#include "wsseg/grid.hpp"
#include "wsseg/propagation.hpp"

namespace wsseg {

/// Undirected weighted 4-neighbor grid graph. right[i] is the weight of the
/// edge (i, i+1) and down[i] that of (i, i+width); both are zero where the
/// neighbor falls outside the grid.
struct AffinityGraph {
  int width = 0;
  int height = 0;
  std::vector<double> right;
  std::vector<double> down;

  AffinityGraph() = default;
  AffinityGraph(int w, int h, double fill = 0.0);

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  /// Row sum of the adjacency matrix.
  double degree(std::size_t i) const;
  /// Throws when a weight is negative, non-finite, or set on a border edge.
  void validate() const;
};

/// Symmetrized graph of a gate field: the weight between neighbors i and j
/// is (g_{i->j} + g_{j->i}) / 2, where g_{i->j} is the mean over the three
/// gate groups of the gate with which j copies i in the scan that visits i
/// immediately before j.
AffinityGraph graph_from_gates(const AffinityField& gates);

/// sum_c alpha_c^T L alpha_c, evaluated edge by edge with compensated summation.
double laplacian_quadratic(const AffinityGraph& graph, const ProbGrid& alpha);

/// sum_c a_c^T L b_c.
double laplacian_bilinear(const AffinityGraph& graph, const ProbGrid& a, const ProbGrid& b);

/// 2 L alpha per channel, laid out like ProbGrid data (N x C).
std::vector<double> energy_gradient(const AffinityGraph& graph, const ProbGrid& alpha);

/// laplacian_quadratic divided by N * C.
double normalized_energy(const AffinityGraph& graph, const ProbGrid& alpha);

struct MiningInequality {
  bool holds = false;
  double mined_form = 0.0;  // Y^T L alpha_u
  double unary_form = 0.0;  // alpha_u^T L alpha_u
};

/// Compares Y^T L alpha_u against alpha_u^T L alpha_u, with Y the one-hot
/// encoding of `mined` and kUnknown rows replaced by the alpha_u rows.
MiningInequality mining_inequality_holds(const AffinityGraph& graph, const LabelGrid& mined,
                                         const ProbGrid& alpha_u);

}  // namespace wsseg
