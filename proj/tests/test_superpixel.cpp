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

#include <algorithm>
#include <queue>

#include "suites.hpp"
#include "support.hpp"
#include "wsseg/error.hpp"
#include "wsseg/superpixel.hpp"
#include "wsseg/synth.hpp"

namespace wsseg {
namespace {

bool regions_are_connected(const SuperpixelMap& sp) {
  const int w = sp.width;
  for (int r = 0; r < sp.region_count; ++r) {
    const auto& members = sp.pixels[static_cast<std::size_t>(r)];
    std::vector<bool> seen(sp.pixel_count(), false);
    std::queue<std::size_t> q;
    q.push(members.front());
    seen[members.front()] = true;
    std::size_t reached = 0;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      ++reached;
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= sp.height) continue;
        const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
        if (!seen[j] && sp.region_id[j] == r) {
          seen[j] = true;
          q.push(j);
        }
      }
    }
    if (reached != members.size()) return false;
  }
  return true;
}

TEST(Segment, UniformImageIsOneRegion) {
  RgbImage img(8, 8, 0.4);
  EXPECT_EQ(segment(img, 100.0, 1).region_count, 1);
}

TEST(Segment, TwoContrastingHalvesGiveTwoRegions) {
  RgbImage img(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * 8 + x;
      for (int ch = 0; ch < 3; ++ch) img.at(i, ch) = x < 4 ? 0.1 : 0.9;
    }
  }
  const auto sp = segment(img, 100.0, 4);
  EXPECT_EQ(sp.region_count, 2);
  EXPECT_EQ(testing::felzenszwalb_oracle(img, 100.0, 4), sp.region_id);
}

TEST(Segment, MinSizeEqualToPixelCountMergesEverything) {
  testing::Rng rng(3);
  const auto img = testing::random_image(rng, 8, 8);
  EXPECT_EQ(segment(img, 100.0, 64).region_count, 1);
}

TEST(Segment, MatchesBruteForceOracleOnRandomImages) {
  EXPECT_EQ(testing::segmentation_oracle_suite(2026, 50), 0);
}

TEST(Segment, PartitionConnectivityAndMinSize) {
  testing::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = testing::patchy_image(rng, 16, 12, 5, 0.08);
    const auto sp = segment(img, 100.0, 5);
    std::size_t total = 0;
    for (int r = 0; r < sp.region_count; ++r) {
      total += sp.region_size(r);
      EXPECT_GE(sp.region_size(r), 5u);
    }
    EXPECT_EQ(total, img.pixel_count());
    EXPECT_TRUE(regions_are_connected(sp));
    // ids are contiguous by construction of make_superpixel_map; check range
    EXPECT_EQ(*std::max_element(sp.region_id.begin(), sp.region_id.end()), sp.region_count - 1);
  }
}

TEST(Segment, LargerScaleNeverAddsRegionsOnCorpus) {
  SceneSpec spec;
  const auto samples = generate(spec, 10);
  for (const auto& s : samples) {
    int last = segment(s.image, 25.0, 16).region_count;
    for (double k : {50.0, 100.0, 200.0, 400.0}) {
      const int now = segment(s.image, k, 16).region_count;
      EXPECT_LE(now, last) << "k=" << k;
      last = now;
    }
  }
}

TEST(Segment, RejectsBadParameters) {
  RgbImage img(4, 4, 0.5);
  EXPECT_THROW(segment(img, 0.0, 1), Error);
  EXPECT_THROW(segment(img, 10.0, 0), Error);
  EXPECT_THROW(segment(RgbImage(), 10.0, 1), Error);
}

SuperpixelMap single_region(int w, int h) {
  return make_superpixel_map(RgbImage(w, h, 0.0), std::vector<int>(static_cast<std::size_t>(w * h), 0));
}

LabelGrid labels_with(int n_class, int n_total, Label c, Label other) {
  LabelGrid g(n_total, 1, 3);
  for (int i = 0; i < n_total; ++i) g.set(static_cast<std::size_t>(i), i < n_class ? c : other);
  return g;
}

TEST(Vote, EightyFivePercentWins) {
  const auto sp = single_region(20, 1);
  EXPECT_EQ(region_label_vote(sp, labels_with(17, 20, 2, 1))[0], 2);
}

TEST(Vote, ExactlyEightyPercentIsUnknown) {
  const auto sp = single_region(20, 1);
  EXPECT_EQ(region_label_vote(sp, labels_with(16, 20, 2, 1))[0], kUnknown);
}

TEST(Vote, FullyUnknownRegionIsUnknown) {
  const auto sp = single_region(5, 1);
  EXPECT_EQ(region_label_vote(sp, LabelGrid(5, 1, 3))[0], kUnknown);
}

TEST(Vote, InvariantToPixelOrder) {
  const auto sp = single_region(20, 1);
  auto labels = labels_with(17, 20, 2, 0);
  std::vector<Label> v(labels.values().begin(), labels.values().end());
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(region_label_vote(sp, LabelGrid(20, 1, 3, v))[0], 2);
}

TEST(Vote, RejectsMajorityOutsideRange) {
  const auto sp = single_region(4, 1);
  EXPECT_THROW(region_label_vote(sp, LabelGrid(4, 1, 2), 0.5), Error);
  EXPECT_THROW(region_label_vote(sp, LabelGrid(4, 1, 2), 1.1), Error);
  EXPECT_THROW(region_label_vote(sp, LabelGrid(5, 1, 2), 0.8), Error);
}

}  // namespace
}  // namespace wsseg
