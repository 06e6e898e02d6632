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
#include <filesystem>
#include <vector>

#include "wsseg/grid.hpp"

namespace wsseg {

/// Partition of an image into 4-connected regions with contiguous ids.
struct SuperpixelMap {
  int width = 0;
  int height = 0;
  int region_count = 0;
  std::vector<int> region_id;                      // per pixel
  std::vector<std::vector<std::size_t>> pixels;    // per region, raster order
  std::vector<std::array<double, 3>> mean_color;   // per region, [0,1] scale

  std::size_t pixel_count() const { return region_id.size(); }
  std::size_t region_size(int r) const { return pixels[static_cast<std::size_t>(r)].size(); }
};

/// Graph-based segmentation over the 4-neighbor grid with edge weights equal
/// to the RGB Euclidean distance on a 0-255 scale. Two components merge when
/// the connecting edge is no heavier than min(Int(A) + k/|A|, Int(B) + k/|B|),
/// followed by a pass that absorbs every component smaller than `min_size`.
/// Edges are visited in ascending weight with ties in (row, col, direction)
/// order, so the result is deterministic.
SuperpixelMap segment(const RgbImage& image, double scale_k, int min_size);

/// Builds the map (ids, pixel lists, mean colors) from a per-pixel id vector
/// whose ids are already contiguous.
SuperpixelMap make_superpixel_map(const RgbImage& image, std::vector<int> region_id);

/// Per-region label: class c when strictly more than `majority` of the
/// region's pixels carry c, kUnknown otherwise.
std::vector<Label> region_label_vote(const SuperpixelMap& sp, const LabelGrid& labels,
                                     double majority = 0.8);

/// Paints a per-region label vector back onto the pixel grid.
LabelGrid paint_regions(const SuperpixelMap& sp, std::span<const Label> region_labels,
                        int num_classes);

/// Region ids modulo 256 as a P5 graymap plus `region_id,size,mean_r,mean_g,mean_b`.
void save_superpixels(const std::filesystem::path& pgm_path,
                      const std::filesystem::path& csv_path, const SuperpixelMap& sp);

}  // namespace wsseg
