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

#include "wsseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "wsseg/error.hpp"
#include "wsseg/pnm.hpp"

namespace wsseg {
namespace {

constexpr double kSpotColor = 0.08;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform double in [0,1) from the top 53 bits, identical on every platform.
double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ splitmix64(stream))) {}
  double uniform() { return unit(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

double rgb_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// 8-bit values so base colors survive the final quantization exactly.
constexpr std::array<std::array<int, 3>, 8> kBasePalette = {{
    {115, 115, 115},
    {230, 51, 38},
    {51, 191, 64},
    {51, 89, 242},
    {242, 217, 38},
    {217, 64, 217},
    {38, 217, 217},
    {242, 140, 26},
}};

// Multi-source BFS distance to the nearest pixel that touches another label.
std::vector<int> boundary_distance(const LabelGrid& gt) {
  const int w = gt.width();
  const int h = gt.height();
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(gt.size(), inf);
  std::deque<std::size_t> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = gt.index(x, y);
      const Label v = gt[i];
      const bool edge = (x > 0 && gt.at(x - 1, y) != v) || (x + 1 < w && gt.at(x + 1, y) != v) ||
                        (y > 0 && gt.at(x, y - 1) != v) || (y + 1 < h && gt.at(x, y + 1) != v);
      if (edge) {
        dist[i] = 1;
        queue.push_back(i);
      }
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    const int nx[4] = {x - 1, x + 1, x, x};
    const int ny[4] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
      const std::size_t j = gt.index(nx[k], ny[k]);
      if (dist[j] == inf) {
        dist[j] = dist[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return dist;
}

std::vector<std::vector<std::size_t>> label_components(const LabelGrid& gt) {
  const int w = gt.width();
  const int h = gt.height();
  std::vector<int> comp(gt.size(), -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < gt.size(); ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<std::size_t> queue{start};
    comp[start] = id;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      out.back().push_back(i);
      const int x = static_cast<int>(i % static_cast<std::size_t>(w));
      const int y = static_cast<int>(i / static_cast<std::size_t>(w));
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        const std::size_t j = gt.index(nx[k], ny[k]);
        if (comp[j] < 0 && gt[j] == gt[i]) {
          comp[j] = id;
          queue.push_back(j);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::array<double, 3>> class_palette(int num_classes) {
  if (num_classes < 2 || num_classes > kMaxClasses) {
    throw Error("class_palette: need between 2 and 254 classes");
  }
  std::vector<std::array<double, 3>> colors;
  for (int c = 0; c < num_classes && c < static_cast<int>(kBasePalette.size()); ++c) {
    const auto& rgb = kBasePalette[static_cast<std::size_t>(c)];
    colors.push_back({rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0});
  }
  Rng rng(0x5EED, 0);
  int attempts = 0;
  while (static_cast<int>(colors.size()) < num_classes) {
    if (++attempts > 100000) throw Error("class_palette: cannot separate that many classes");
    const std::array<double, 3> cand = {rng.uniform(), rng.uniform(), rng.uniform()};
    if (std::all_of(colors.begin(), colors.end(),
                    [&](const auto& c) { return rgb_distance(c, cand) >= 0.3; })) {
      colors.push_back(cand);
    }
  }
  return colors;
}

SceneSample generate_one(const SceneSpec& spec, int index) {
  if (spec.width < 8 || spec.height < 8) throw Error("generate: image too small");
  if (spec.min_shapes < 1 || spec.max_shapes < spec.min_shapes) {
    throw Error("generate: invalid shape count range");
  }
  const auto palette = class_palette(spec.num_classes);
  Rng rng(spec.seed, static_cast<std::uint64_t>(index));
  const int w = spec.width;
  const int h = spec.height;
  SceneSample sample{RgbImage(w, h), LabelGrid(w, h, spec.num_classes, 0)};

  const double angle = rng.uniform(0.0, 2.0 * std::acos(-1.0));
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = sample.gt.index(x, y);
      const double t = 0.5 + 0.5 * (dx * (2.0 * x / (w - 1) - 1.0) + dy * (2.0 * y / (h - 1) - 1.0)) /
                                 std::sqrt(2.0);
      for (int ch = 0; ch < 3; ++ch) {
        const double v = palette[0][static_cast<std::size_t>(ch)] +
                         spec.background_ramp * (t - 0.5) +
                         rng.uniform(-spec.background_noise, spec.background_noise);
        sample.image.at(i, ch) = std::clamp(v, 0.0, 1.0);
      }
    }
  }

  const int shapes = rng.integer(spec.min_shapes, spec.max_shapes);
  for (int s = 0; s < shapes; ++s) {
    const int cls = rng.integer(1, spec.num_classes - 1);
    const bool ellipse = rng.uniform() < 0.5;
    double a = 0.0;
    double b = 0.0;
    int placed = 0;
    for (; placed < 100; ++placed) {
      a = rng.uniform(spec.min_radius, spec.max_radius);
      b = rng.uniform(spec.min_radius, spec.max_radius);
      if (2.0 * a + 2.0 < w && 2.0 * b + 2.0 < h) break;
    }
    if (placed == 100) throw Error("generate: cannot fit a shape inside the image");
    const double cx = rng.uniform(a, w - 1 - a);
    const double cy = rng.uniform(b, h - 1 - b);
    const auto& base = palette[static_cast<std::size_t>(cls)];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double u = (x - cx) / a;
        const double v = (y - cy) / b;
        const double r = ellipse ? std::sqrt(u * u + v * v) : std::max(std::abs(u), std::abs(v));
        if (r > 1.0) continue;
        const std::size_t i = sample.gt.index(x, y);
        sample.gt.set(i, static_cast<Label>(cls));
        const double blend = spec.shading * r * std::sqrt(r);
        for (int ch = 0; ch < 3; ++ch) {
          const double under = sample.image.at(i, ch);
          const double val = (1.0 - blend) * base[static_cast<std::size_t>(ch)] + blend * under +
                             rng.uniform(-spec.noise, spec.noise);
          sample.image.at(i, ch) = std::clamp(val, 0.0, 1.0);
        }
      }
    }
  }
  if (spec.spot_density > 0.0) {
    const double mean_area = std::acos(-1.0) * (1.0 + spec.spot_radius) * (1.0 + spec.spot_radius) / 4.0;
    const int spots = static_cast<int>(std::lround(spec.spot_density * w * h / mean_area));
    for (int s = 0; s < spots; ++s) {
      const double cx = rng.uniform(0.0, w - 1.0);
      const double cy = rng.uniform(0.0, h - 1.0);
      const double radius = rng.uniform(1.0, spec.spot_radius);
      for (int y = std::max(0, static_cast<int>(cy - radius)); y <= std::min(h - 1, static_cast<int>(cy + radius) + 1); ++y) {
        for (int x = std::max(0, static_cast<int>(cx - radius)); x <= std::min(w - 1, static_cast<int>(cx + radius) + 1); ++x) {
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > radius * radius) continue;
          const std::size_t i = sample.gt.index(x, y);
          for (int ch = 0; ch < 3; ++ch) {
            sample.image.at(i, ch) = std::clamp(kSpotColor + rng.uniform(-spec.noise, spec.noise), 0.0, 1.0);
          }
        }
      }
    }
  }
  // 8-bit quantization so the in-memory corpus equals its P6 round trip
  for (double& v : sample.image.data) v = static_cast<double>(std::lround(v * 255.0)) / 255.0;
  return sample;
}

std::vector<SceneSample> generate(const SceneSpec& spec, int n_images) {
  if (n_images < 1) throw Error("generate: need at least one image");
  std::vector<SceneSample> out;
  out.reserve(static_cast<std::size_t>(n_images));
  for (int i = 0; i < n_images; ++i) out.push_back(generate_one(spec, i));
  return out;
}

SeedResult make_seeds(const LabelGrid& gt, const SeedSpec& spec, int image_index) {
  if (!(spec.coverage > 0.0 && spec.coverage <= 1.0)) {
    throw Error("make_seeds: coverage must lie in (0, 1]");
  }
  if (!(spec.flip_rate >= 0.0 && spec.flip_rate <= 0.3)) {
    throw Error("make_seeds: flip_rate must lie in [0, 0.3]");
  }
  if (spec.erode_radius < 0) throw Error("make_seeds: erode_radius must be >= 0");
  const int c_count = gt.num_classes();
  const auto dist = boundary_distance(gt);
  SeedResult result{LabelGrid(gt.width(), gt.height(), c_count), false};

  std::vector<bool> seeded_class(static_cast<std::size_t>(c_count), false);
  std::vector<bool> present_class(static_cast<std::size_t>(c_count), false);
  for (auto& comp : label_components(gt)) {
    present_class[gt[comp.front()]] = true;
    std::vector<std::size_t> kept;
    for (std::size_t p : comp) {
      if (dist[p] > spec.erode_radius) kept.push_back(p);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [&](std::size_t l, std::size_t r) { return dist[l] > dist[r]; });
    const auto count = static_cast<std::size_t>(std::llround(spec.coverage * static_cast<double>(kept.size())));
    kept.resize(std::min(count, kept.size()));
    for (std::size_t p : kept) {
      const Label truth = gt[p];
      seeded_class[truth] = true;
      const std::uint64_t key = splitmix64(spec.seed ^ splitmix64(
          (static_cast<std::uint64_t>(image_index) << 32) ^ static_cast<std::uint64_t>(p)));
      Label label = truth;
      if (c_count > 1 && unit(key) < spec.flip_rate) {
        const int offset = 1 + static_cast<int>(unit(splitmix64(key)) * (c_count - 1));
        label = static_cast<Label>((truth + offset) % c_count);
      }
      result.seeds.set(p, label);
    }
  }
  for (int c = 0; c < c_count; ++c) {
    if (present_class[static_cast<std::size_t>(c)] && !seeded_class[static_cast<std::size_t>(c)]) {
      result.class_vanished = true;
    }
  }
  return result;
}

Corpus make_corpus(const SceneSpec& scene, const SeedSpec& seeds, int n_images) {
  Corpus corpus;
  corpus.num_classes = scene.num_classes;
  auto samples = generate(scene, n_images);
  for (int i = 0; i < n_images; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "%04d", i);
    auto& s = samples[static_cast<std::size_t>(i)];
    SeedResult seed = make_seeds(s.gt, seeds, i);
    corpus.items.push_back({name, std::move(s.image), std::move(s.gt), std::move(seed.seeds)});
  }
  return corpus;
}

void save_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  namespace fs = std::filesystem;
  for (const char* sub : {"img", "gt", "seed"}) fs::create_directories(dir / sub);
  for (const auto& item : corpus.items) {
    pnm::save_ppm(dir / "img" / (item.name + ".ppm"), item.image);
    pnm::save_labels(dir / "gt" / (item.name + ".pgm"), item.gt);
    pnm::save_labels(dir / "seed" / (item.name + ".pgm"), item.seeds);
  }
  std::ofstream meta(dir / "corpus.cfg");
  if (!meta) throw Error("cannot write corpus metadata");
  meta << "num_classes=" << corpus.num_classes << "\ncount=" << corpus.items.size() << "\n";
}

Corpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::ifstream meta(dir / "corpus.cfg");
  if (!meta) throw Error("missing " + (dir / "corpus.cfg").string());
  Corpus corpus;
  std::string line;
  while (std::getline(meta, line)) {
    if (line.rfind("num_classes=", 0) == 0) corpus.num_classes = std::stoi(line.substr(12));
  }
  if (corpus.num_classes < 2) throw Error("corpus.cfg: num_classes missing or invalid");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir / "img")) {
    if (entry.path().extension() == ".ppm") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    CorpusItem item;
    item.name = name;
    item.image = pnm::load_ppm(dir / "img" / (name + ".ppm"));
    item.gt = pnm::load_labels(dir / "gt" / (name + ".pgm"), corpus.num_classes);
    const fs::path seed_path = dir / "seed" / (name + ".pgm");
    if (!fs::exists(seed_path)) throw Error("missing seed map for image " + name);
    item.seeds = pnm::load_labels(seed_path, corpus.num_classes);
    corpus.items.push_back(std::move(item));
  }
  if (corpus.items.empty()) throw Error("corpus at " + dir.string() + " has no images");
  return corpus;
}

}  // namespace wsseg
