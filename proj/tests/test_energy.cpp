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

#include <gtest/gtest.h>

#include <cmath>

#include "suites.hpp"
#include "support.hpp"
#include "wsseg/energy.hpp"
#include "wsseg/error.hpp"

namespace wsseg {
namespace {

ProbGrid two_pixel_alpha() {
  ProbGrid a(2, 1, 1);
  a.at(0, 0) = 1.0;
  a.at(1, 0) = 0.0;
  return a;
}

TEST(Energy, ConstantAlphaIsZero) {
  testing::Rng rng(1);
  const auto g = testing::random_graph(rng, 5, 4);
  ProbGrid a(5, 4, 3);
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    a.at(i, 0) = 0.2;
    a.at(i, 1) = 0.5;
    a.at(i, 2) = 0.3;
  }
  EXPECT_EQ(laplacian_quadratic(g, a), 0.0);
  for (double v : energy_gradient(g, a)) EXPECT_EQ(v, 0.0);
}

TEST(Energy, TwoPixelSingleEdge) {
  AffinityGraph g(2, 1, 1.0);
  EXPECT_DOUBLE_EQ(laplacian_quadratic(g, two_pixel_alpha()), 1.0);
}

TEST(Energy, TwoPixelGradient) {
  AffinityGraph g(2, 1, 1.0);
  const auto grad = energy_gradient(g, two_pixel_alpha());
  ASSERT_EQ(grad.size(), 2u);
  EXPECT_DOUBLE_EQ(grad[0], 2.0);
  EXPECT_DOUBLE_EQ(grad[1], -2.0);
}

TEST(Energy, EdgeSumMatchesDenseMatrix) {
  EXPECT_LT(testing::energy_oracle_suite(99, 100), 1e-9);
}

TEST(Energy, GradientMatchesFiniteDifferences) {
  testing::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testing::random_graph(rng, 4, 4);
    const auto a = testing::random_probs(rng, 4, 4, 3);
    const auto analytic = energy_gradient(g, a);
    std::vector<double> x(a.data().begin(), a.data().end());
    auto f = [&](std::span<const double> v) {
      ProbGrid p(4, 4, 3);
      std::copy(v.begin(), v.end(), p.data().begin());
      return laplacian_quadratic(g, p);
    };
    EXPECT_LT(testing::check_gradient(f, x, analytic).worst_relative, 1e-4);
  }
}

TEST(Energy, NonNegativeAndScalesWithWeights) {
  testing::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testing::random_graph(rng, 6, 5);
    const auto a = testing::random_probs(rng, 6, 5, 4);
    const double e = laplacian_quadratic(g, a);
    EXPECT_GE(e, 0.0);
    for (double& v : g.right) v *= 3.0;
    for (double& v : g.down) v *= 3.0;
    EXPECT_NEAR(laplacian_quadratic(g, a), 3.0 * e, 1e-12 * (1.0 + e));
  }
}

TEST(Energy, DegreeIsRowSum) {
  testing::Rng rng(4);
  const auto g = testing::random_graph(rng, 5, 3);
  const auto dense = testing::dense_adjacency(g);
  const std::size_t n = g.vertex_count();
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += dense[i * n + j];
    EXPECT_DOUBLE_EQ(g.degree(i), row);
  }
}

TEST(Energy, SizeMismatchThrows) {
  AffinityGraph g(3, 3, 1.0);
  EXPECT_THROW(laplacian_quadratic(g, ProbGrid(3, 2, 2, 0.5)), Error);
  EXPECT_THROW(energy_gradient(g, ProbGrid(2, 3, 2, 0.5)), Error);
}

TEST(Energy, SymmetrizedGraphFromGates) {
  testing::Rng rng(12);
  const auto gates = testing::random_gates(rng, 4, 3);
  const auto g = graph_from_gates(gates);
  EXPECT_NO_THROW(g.validate());
  // edge (0,0)-(1,0): forward gate sits at the target of a left-to-right
  // step, backward gate at the target of the right-to-left step
  double fwd = 0.0;
  double bwd = 0.0;
  for (int k = 0; k < kGateGroups; ++k) {
    fwd += gates.gate(gate_field(ScanDirection::kLeftToRight, k), 1) / 3.0;
    bwd += gates.gate(gate_field(ScanDirection::kRightToLeft, k), 0) / 3.0;
  }
  EXPECT_NEAR(g.right[0], 0.5 * (fwd + bwd), 1e-15);
}

TEST(Energy, NormalizedByPixelsAndClasses) {
  AffinityGraph g(2, 1, 1.0);
  EXPECT_DOUBLE_EQ(normalized_energy(g, two_pixel_alpha()), 0.5);
}

TEST(MiningInequality, ArgmaxOfConstantAlphaGivesZeroBothSides) {
  testing::Rng rng(2);
  const auto g = testing::random_graph(rng, 4, 4);
  ProbGrid a(4, 4, 3);
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    a.at(i, 0) = 0.6;
    a.at(i, 1) = 0.3;
    a.at(i, 2) = 0.1;
  }
  const auto r = mining_inequality_holds(g, a.argmax(), a);
  EXPECT_EQ(r.mined_form, 0.0);
  EXPECT_EQ(r.unary_form, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(MiningInequality, AllUnknownMinedMapIsEquality) {
  testing::Rng rng(3);
  const auto g = testing::random_graph(rng, 5, 4);
  const auto a = testing::random_probs(rng, 5, 4, 3);
  const auto r = mining_inequality_holds(g, LabelGrid(5, 4, 3), a);
  EXPECT_DOUBLE_EQ(r.mined_form, r.unary_form);
  EXPECT_TRUE(r.holds);
}

TEST(MiningInequality, BilinearFormMatchesDenseOracle) {
  testing::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(rng, 5, 5);
    const auto a = testing::random_probs(rng, 5, 5, 3);
    const auto y = testing::random_labels(rng, 5, 5, 3, 0.5);
    const auto r = mining_inequality_holds(g, y, a);
    const auto yy = ProbGrid::one_hot(y, &a);
    EXPECT_NEAR(r.mined_form, testing::dense_laplacian_form(g, yy, a), 1e-9);
    EXPECT_NEAR(r.unary_form, testing::dense_laplacian_form(g, a, a), 1e-9);
  }
}

}  // namespace
}  // namespace wsseg
