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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wsseg/grid.hpp"

namespace wsseg {

/// Synthetic scene parameters: shaded ellipses and rectangles of per-class
/// base colors over a textured background.
struct SceneSpec {
  int width = 64;
  int height = 64;
  int num_classes = 4;  // including background
  int min_shapes = 1;
  int max_shapes = 3;
  double min_radius = 8.0;
  double max_radius = 18.0;
  /// Toward the rim, object colors blend into whatever lies underneath; this
  /// is the blend weight reached at the rim.
  double shading = 0.3;
  /// Uniform per-pixel noise amplitude on objects.
  double noise = 0.1;
  /// Background: per-pixel noise amplitude and linear-ramp amplitude.
  double background_noise = 0.08;
  double background_ramp = 0.2;
  /// Dark spots of one shared color scattered over objects and background
  /// alike; they keep the label of whatever lies underneath.
  double spot_density = 0.15;
  double spot_radius = 2.0;
  std::uint64_t seed = 42;
};

struct SceneSample {
  RgbImage image;
  LabelGrid gt;
};

/// Base color per class; class 0 is the background. Colors are pairwise at
/// least 0.3 apart in RGB.
std::vector<std::array<double, 3>> class_palette(int num_classes);

/// Deterministic in the spec seed. Throws when a shape cannot be placed.
std::vector<SceneSample> generate(const SceneSpec& spec, int n_images);
SceneSample generate_one(const SceneSpec& spec, int index);

struct SeedSpec {
  int erode_radius = 1;
  double flip_rate = 0.3;
  double coverage = 0.6;
  std::uint64_t seed = 42;
};

struct SeedResult {
  LabelGrid seeds;
  /// Some class of gt has no seed pixel left.
  bool class_vanished = false;
};

/// Coarse seeds: per connected gt region, drop pixels within erode_radius of
/// another label, keep the `coverage` fraction of the remaining pixels that
/// lie deepest inside the region, flip `flip_rate` of those to a wrong class,
/// and mark everything else kUnknown. `image_index` decorrelates images.
SeedResult make_seeds(const LabelGrid& gt, const SeedSpec& spec, int image_index = 0);

/// One corpus entry as stored on disk.
struct CorpusItem {
  std::string name;
  RgbImage image;
  LabelGrid gt;
  LabelGrid seeds;
};

struct Corpus {
  int num_classes = 0;
  std::vector<CorpusItem> items;
};

Corpus make_corpus(const SceneSpec& scene, const SeedSpec& seeds, int n_images);

/// Layout: dir/{img,gt,seed}/NNNN.(ppm|pgm) plus dir/corpus.cfg.
void save_corpus(const std::filesystem::path& dir, const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& dir);

}  // namespace wsseg
