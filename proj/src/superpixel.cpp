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

#include "wsseg/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "wsseg/error.hpp"
#include "wsseg/pnm.hpp"

namespace wsseg {
namespace {

struct Edge {
  std::size_t a;
  std::size_t b;
  double weight;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  std::size_t join(std::size_t a, std::size_t b) {
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

  std::size_t size(std::size_t root) const { return size_[root]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
  std::vector<std::size_t> size_;
};

double color_distance(const RgbImage& image, std::size_t a, std::size_t b) {
  double sum = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    const double d = (image.at(a, ch) - image.at(b, ch)) * 255.0;
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<Edge> grid_edges(const RgbImage& image) {
  const int w = image.width;
  const int h = image.height;
  std::vector<Edge> edges;
  edges.reserve(image.pixel_count() * 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) edges.push_back({i, i + 1, color_distance(image, i, i + 1)});
      if (y + 1 < h) edges.push_back({i, i + w, color_distance(image, i, i + w)});
    }
  }
  // generation order is (row, col, direction); stability keeps it for ties
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& l, const Edge& r) { return l.weight < r.weight; });
  return edges;
}

}  // namespace

SuperpixelMap segment(const RgbImage& image, double scale_k, int min_size) {
  if (image.empty() || image.data.size() != image.pixel_count() * 3) {
    throw Error("segment: empty or malformed image");
  }
  if (!(scale_k > 0.0)) throw Error("segment: scale_k must be positive");
  if (min_size < 1) throw Error("segment: min_size must be at least 1");

  const std::size_t n = image.pixel_count();
  const auto edges = grid_edges(image);
  DisjointSets sets(n);
  std::vector<double> threshold(n, scale_k);

  for (const Edge& e : edges) {
    std::size_t a = sets.find(e.a);
    std::size_t b = sets.find(e.b);
    if (a == b) continue;
    if (e.weight <= threshold[a] && e.weight <= threshold[b]) {
      const std::size_t root = sets.join(a, b);
      threshold[root] = e.weight + scale_k / static_cast<double>(sets.size(root));
    }
  }
  for (const Edge& e : edges) {
    std::size_t a = sets.find(e.a);
    std::size_t b = sets.find(e.b);
    if (a == b) continue;
    if (sets.size(a) < static_cast<std::size_t>(min_size) ||
        sets.size(b) < static_cast<std::size_t>(min_size)) {
      sets.join(a, b);
    }
  }

  std::vector<int> root_to_id(n, -1);
  std::vector<int> ids(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (root_to_id[root] < 0) root_to_id[root] = next++;
    ids[i] = root_to_id[root];
  }
  return make_superpixel_map(image, std::move(ids));
}

SuperpixelMap make_superpixel_map(const RgbImage& image, std::vector<int> region_id) {
  if (region_id.size() != image.pixel_count()) {
    throw Error("superpixel map size does not match image");
  }
  SuperpixelMap sp;
  sp.width = image.width;
  sp.height = image.height;
  sp.region_count =
      region_id.empty() ? 0 : *std::max_element(region_id.begin(), region_id.end()) + 1;
  sp.region_id = std::move(region_id);
  sp.pixels.resize(static_cast<std::size_t>(sp.region_count));
  sp.mean_color.assign(static_cast<std::size_t>(sp.region_count), {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < sp.region_id.size(); ++i) {
    const int r = sp.region_id[i];
    if (r < 0) throw Error("superpixel ids must be non-negative");
    sp.pixels[static_cast<std::size_t>(r)].push_back(i);
    for (int ch = 0; ch < 3; ++ch) sp.mean_color[static_cast<std::size_t>(r)][ch] += image.at(i, ch);
  }
  for (int r = 0; r < sp.region_count; ++r) {
    const auto size = static_cast<double>(sp.region_size(r));
    if (size == 0) throw Error("superpixel ids must be contiguous");
    for (double& v : sp.mean_color[static_cast<std::size_t>(r)]) v /= size;
  }
  return sp;
}

std::vector<Label> region_label_vote(const SuperpixelMap& sp, const LabelGrid& labels,
                                     double majority) {
  if (labels.width() != sp.width || labels.height() != sp.height) {
    throw Error("region_label_vote: dimension mismatch");
  }
  if (!(majority > 0.5 && majority <= 1.0)) {
    throw Error("region_label_vote: majority must be in (0.5, 1]");
  }
  const int c_count = labels.num_classes();
  std::vector<Label> out(static_cast<std::size_t>(sp.region_count), kUnknown);
  std::vector<std::size_t> counts(static_cast<std::size_t>(c_count));
  for (int r = 0; r < sp.region_count; ++r) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t p : sp.pixels[static_cast<std::size_t>(r)]) {
      if (!labels.is_unknown(p)) ++counts[labels[p]];
    }
    const double bar = majority * static_cast<double>(sp.region_size(r));
    for (int c = 0; c < c_count; ++c) {
      if (static_cast<double>(counts[c]) > bar) {
        out[static_cast<std::size_t>(r)] = static_cast<Label>(c);
        break;
      }
    }
  }
  return out;
}

LabelGrid paint_regions(const SuperpixelMap& sp, std::span<const Label> region_labels,
                        int num_classes) {
  if (region_labels.size() != static_cast<std::size_t>(sp.region_count)) {
    throw Error("paint_regions: one label per region required");
  }
  LabelGrid out(sp.width, sp.height, num_classes);
  for (std::size_t i = 0; i < sp.region_id.size(); ++i) {
    out.set(i, region_labels[static_cast<std::size_t>(sp.region_id[i])]);
  }
  return out;
}

void save_superpixels(const std::filesystem::path& pgm_path,
                      const std::filesystem::path& csv_path, const SuperpixelMap& sp) {
  pnm::Graymap map{sp.width, sp.height, {}};
  map.pixels.reserve(sp.region_id.size());
  for (int id : sp.region_id) map.pixels.push_back(static_cast<std::uint8_t>(id % 256));
  pnm::save_pgm(pgm_path, map);

  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot open " + csv_path.string());
  csv << "region_id,size,mean_r,mean_g,mean_b\n";
  char line[160];
  for (int r = 0; r < sp.region_count; ++r) {
    const auto& m = sp.mean_color[static_cast<std::size_t>(r)];
    std::snprintf(line, sizeof(line), "%d,%zu,%.6f,%.6f,%.6f\n", r, sp.region_size(r), m[0],
                  m[1], m[2]);
    csv << line;
  }
}

}  // namespace wsseg
