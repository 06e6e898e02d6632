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
#include "wsseg/em.hpp"
#include "wsseg/error.hpp"
#include "wsseg/schedule.hpp"
#include "wsseg/unary.hpp"

namespace wsseg {
namespace {

TEST(Schedule, PolynomialStartsAtBase) {
  EXPECT_DOUBLE_EQ(lr_at(LrSchedule::polynomial(0.001, 0.9, 20000), 0), 0.001);
}

TEST(Schedule, PolynomialEndsAtZero) {
  EXPECT_EQ(lr_at(LrSchedule::polynomial(0.001, 0.9, 20000), 20000), 0.0);
}

TEST(Schedule, StepDecayAfterOneStep) {
  EXPECT_NEAR(lr_at(LrSchedule::step(0.001, 0.1, 20000, 40000), 25000), 0.0001, 1e-18);
}

TEST(Schedule, BeyondMaxIterationThrows) {
  EXPECT_THROW(lr_at(LrSchedule::polynomial(0.001, 0.9, 100), 101), Error);
  EXPECT_THROW(lr_at(LrSchedule::step(0.001, 0.1, 10, 100), -1), Error);
}

TEST(Schedule, NonIncreasingAndPositiveBeforeEnd) {
  for (const auto& s : {LrSchedule::polynomial(0.01, 0.5, 300), LrSchedule::step(0.01, 0.1, 40, 300)}) {
    double last = lr_at(s, 0);
    for (int k = 1; k < s.max_iter; ++k) {
      const double now = lr_at(s, k);
      EXPECT_GT(now, 0.0);
      EXPECT_LE(now, last);
      last = now;
    }
  }
}

TEST(Schedule, UnaryBaseRate) { EXPECT_DOUBLE_EQ(lr_at(RunConfig{}.unary.schedule, 0), 0.001); }

UnaryParams random_unary(testing::Rng& rng, int c, double amplitude) {
  auto p = UnaryParams::zeros(c);
  for (double& v : p.values) v = testing::uniform(rng, -amplitude, amplitude);
  return p;
}

TEST(Predict, ZeroParametersAreUniform) {
  testing::Rng rng(1);
  const auto f = extract_features(testing::random_image(rng, 4, 3));
  const auto p = predict(UnaryParams::zeros(5), f);
  for (double v : p.data()) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(Predict, ShiftingEveryLogitChangesNothing) {
  testing::Rng rng(2);
  const auto f = extract_features(testing::random_image(rng, 4, 3));
  auto params = random_unary(rng, 4, 2.0);
  const auto before = predict(params, f);
  for (int c = 0; c < 4; ++c) params.bias(c) += 3.7;
  const auto after = predict(params, f);
  for (std::size_t k = 0; k < before.data().size(); ++k) {
    EXPECT_NEAR(before.data()[k], after.data()[k], 1e-12);
  }
}

TEST(Predict, MatchesStraightLineSoftmax) {
  testing::Rng rng(3);
  const auto f = extract_features(testing::random_image(rng, 3, 3));
  auto params = random_unary(rng, 3, 1.5);
  const auto out = predict(params, f);
  EXPECT_TRUE(out.is_valid(1e-6));
  const auto x = f.pixel(4);
  double z[3];
  for (int c = 0; c < 3; ++c) {
    z[c] = params.bias(c);
    for (int d = 0; d < kFeatureDim; ++d) z[c] += params.weight(c, d) * x[d];
  }
  const double norm = std::exp(z[0]) + std::exp(z[1]) + std::exp(z[2]);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(out.at(4, c), std::exp(z[c]) / norm, 1e-9);
}

TEST(Predict, NonFiniteParametersThrow) {
  auto params = UnaryParams::zeros(2);
  params.values[0] = INFINITY;
  RgbImage img(2, 2, 0.1);
  EXPECT_THROW(predict(params, extract_features(img)), Error);
}

TEST(Harden, TiesBecomeUnknown) {
  ProbGrid p(2, 1, 2);
  p.at(0, 0) = 0.5;
  p.at(0, 1) = 0.5;
  p.at(1, 0) = 0.2;
  p.at(1, 1) = 0.8;
  const auto y = harden(p);
  EXPECT_TRUE(y.is_unknown(0));
  EXPECT_EQ(y[1], 1);
}

TEST(UnaryGradient, MatchesFiniteDifferences) {
  EXPECT_LT(testing::unary_gradient_suite(4242, 20), 1e-4);
}

TEST(TrainUnary, SeparableTwoClassImage) {
  // left half dark red, right half light blue, with mild noise
  testing::Rng rng(5);
  RgbImage img(16, 16);
  LabelGrid gt(16, 16, 2);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * 16 + x;
      const bool right = x >= 8;
      img.at(i, 0) = (right ? 0.2 : 0.7) + testing::uniform(rng, -0.05, 0.05);
      img.at(i, 1) = 0.3 + testing::uniform(rng, -0.05, 0.05);
      img.at(i, 2) = (right ? 0.8 : 0.2) + testing::uniform(rng, -0.05, 0.05);
      gt.set(i, static_cast<Label>(right ? 1 : 0));
    }
  }
  const auto f = extract_features(img);
  const LabeledPixels data[1] = {{&f, &gt}};
  auto init = UnaryParams::zeros(2);
  init.scaling = fit_unary_scaling(data);
  const auto out = train_unary(init, data, RunConfig{}.unary);
  const auto pred = predict(out.params, f).argmax();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) correct += pred[i] == gt[i];
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(gt.size()), 0.99);
  EXPECT_LE(out.loss_history.back(), out.loss_history.front());
  for (std::size_t k = 0; k + 50 < out.loss_history.size(); k += 50) {
    EXPECT_LE(out.loss_history[k + 50], out.loss_history[k]);
  }
}

TEST(TrainUnary, SelfConsistentTargetsDoNotRiseOnFirstStep) {
  testing::Rng rng(6);
  const auto f = extract_features(testing::random_image(rng, 8, 8));
  auto init = random_unary(rng, 3, 1.0);
  const LabelGrid y = predict(init, f).argmax(true);
  const LabeledPixels data[1] = {{&f, &y}};
  DescentConfig cfg = RunConfig{}.unary;
  cfg.steps = 1;
  const auto out = train_unary(init, data, cfg);
  EXPECT_LE(out.loss_history.back(), out.loss_history.front() + 1e-9);
}

TEST(TrainUnary, NoLabeledPixelsThrows) {
  RgbImage img(3, 3, 0.2);
  const auto f = extract_features(img);
  const LabelGrid y(3, 3, 2);
  const LabeledPixels data[1] = {{&f, &y}};
  EXPECT_THROW(train_unary(UnaryParams::zeros(2), data, RunConfig{}.unary), Error);
}

}  // namespace
}  // namespace wsseg
