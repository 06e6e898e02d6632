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

#include "support.hpp"
#include "wsseg/error.hpp"
#include "wsseg/grid.hpp"

namespace wsseg {
namespace {

TEST(Features, UniformGrayGivesConstantColorAndLocalMean) {
  RgbImage img(5, 4, 0.5);
  const auto f = extract_features(img);
  ASSERT_EQ(f.data.size(), img.pixel_count() * kFeatureDim);
  for (std::size_t i = 0; i < f.pixel_count(); ++i) {
    const auto p = f.pixel(i);
    for (int k : {0, 1, 2, 5, 6, 7}) EXPECT_DOUBLE_EQ(p[k], 0.5);
  }
}

TEST(Features, SinglePixelCoordinatesAreOrigin) {
  RgbImage img(1, 1, 0.3);
  const auto f = extract_features(img);
  EXPECT_EQ(f.pixel(0)[3], 0.0);
  EXPECT_EQ(f.pixel(0)[4], 0.0);
}

TEST(Features, CheckerboardCornerUsesClampedWindow) {
  // 2x2 checkerboard: the clamped 3x3 window of any pixel is the whole image.
  RgbImage img(2, 2);
  const double v[4] = {1.0, 0.0, 0.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    for (int ch = 0; ch < 3; ++ch) img.at(i, ch) = v[i] * (ch + 1) / 3.0;
  }
  const auto f = extract_features(img);
  for (int ch = 0; ch < 3; ++ch) {
    const double expected = (2.0 * (ch + 1) / 3.0) / 4.0;
    EXPECT_NEAR(f.pixel(0)[5 + ch], expected, 1e-15);
  }
  EXPECT_EQ(f.pixel(3)[3], 1.0);
  EXPECT_EQ(f.pixel(3)[4], 1.0);
}

TEST(Features, EmptyImageThrows) { EXPECT_THROW(extract_features(RgbImage()), Error); }

TEST(Features, ShiftedConstantImageKeepsColorFeatures) {
  RgbImage a(6, 6, 0.25);
  RgbImage b(9, 7, 0.25);
  const auto fa = extract_features(a);
  const auto fb = extract_features(b);
  for (int k : {0, 1, 2, 5, 6, 7}) EXPECT_DOUBLE_EQ(fa.pixel(7)[k], fb.pixel(20)[k]);
}

LabelGrid half_split(int w, int h, Label left, Label right) {
  LabelGrid g(w, h, 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g.set(x, y, x < w / 2 ? left : right);
  }
  return g;
}

TEST(MeanIou, IdentityIsOne) {
  const auto gt = half_split(4, 4, 0, 1);
  EXPECT_DOUBLE_EQ(mean_iou(gt, gt).mean_iou, 1.0);
}

TEST(MeanIou, AllBackgroundAgainstHalfSplit) {
  const auto gt = half_split(4, 4, 0, 1);
  const LabelGrid pred(4, 4, 2, Label{0});
  const auto m = mean_iou(pred, gt);
  EXPECT_DOUBLE_EQ(m.per_class_iou[0], 0.5);
  EXPECT_DOUBLE_EQ(m.per_class_iou[1], 0.0);
  EXPECT_DOUBLE_EQ(m.mean_iou, 0.25);
}

TEST(MeanIou, AllUnknownIsZero) {
  const auto gt = half_split(4, 4, 0, 1);
  const LabelGrid pred(4, 4, 2);
  EXPECT_DOUBLE_EQ(mean_iou(pred, gt).mean_iou, 0.0);
}

TEST(MeanIou, DimensionMismatchThrows) {
  EXPECT_THROW(mean_iou(LabelGrid(3, 3, 2, Label{0}), LabelGrid(3, 4, 2, Label{0})), Error);
}

TEST(MeanIou, AveragesOnlyClassesPresentInGroundTruth) {
  LabelGrid gt(2, 1, 3, Label{0});
  LabelGrid pred(2, 1, 3, Label{0});
  pred.set(1, Label{2});
  const auto m = mean_iou(pred, gt);
  EXPECT_TRUE(std::isnan(m.per_class_iou[1]));
  EXPECT_DOUBLE_EQ(m.mean_iou, 0.5);
}

TEST(Precision, IdentityIsOne) {
  const auto gt = half_split(4, 4, 0, 1);
  EXPECT_DOUBLE_EQ(precision(gt, gt), 1.0);
}

TEST(Precision, ThreeOfFourLabeledCorrect) {
  LabelGrid gt(3, 2, 2, Label{1});
  LabelGrid pred(3, 2, 2);
  pred.set(0, Label{1});
  pred.set(1, Label{1});
  pred.set(2, Label{1});
  pred.set(3, Label{0});
  EXPECT_DOUBLE_EQ(precision(pred, gt), 0.75);
}

TEST(Precision, AllUnknownIsVacuousOne) {
  const auto gt = half_split(4, 4, 0, 1);
  const LabelGrid pred(4, 4, 2);
  EXPECT_DOUBLE_EQ(precision(pred, gt), 1.0);
  const auto m = mean_iou(pred, gt);
  EXPECT_TRUE(m.precision_vacuous);
  EXPECT_DOUBLE_EQ(m.precision, 1.0);
}

TEST(Precision, FlippingCorrectPixelsNeverRaisesIt) {
  testing::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    LabelGrid gt = testing::random_labels(rng, 6, 6, 3, 1.0);
    LabelGrid pred = gt;
    double last = precision(pred, gt);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      pred.set(i, static_cast<Label>((gt[i] + 1) % 3));
      const double now = precision(pred, gt);
      EXPECT_LE(now, last);
      last = now;
    }
  }
}

TEST(ProbGrid, NormalizeAndArgmaxTies) {
  ProbGrid p(2, 1, 3);
  p.at(0, 0) = 2.0;
  p.at(0, 1) = 1.0;
  p.at(0, 2) = 1.0;
  p.at(1, 0) = 1.0;
  p.at(1, 1) = 1.0;
  p.at(1, 2) = 0.0;
  p.normalize();
  EXPECT_TRUE(p.is_valid());
  const auto hard = p.argmax(true);
  EXPECT_EQ(hard[0], 0);
  EXPECT_TRUE(hard.is_unknown(1));
}

TEST(LabelGrid, RejectsOutOfRangeClass) {
  LabelGrid g(2, 2, 3);
  EXPECT_THROW(g.set(0, Label{3}), Error);
  EXPECT_NO_THROW(g.set(0, kUnknown));
}

}  // namespace
}  // namespace wsseg
