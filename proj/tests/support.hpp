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

// Independent oracles and random instance builders shared by the unit tests
// and the acceptance runner. Everything here is written against the
// mathematical definitions, not against the library internals.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include "wsseg/energy.hpp"
#include "wsseg/grid.hpp"
#include "wsseg/propagation.hpp"
#include "wsseg/superpixel.hpp"

namespace wsseg::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline RgbImage random_image(Rng& rng, int w, int h) {
  RgbImage img(w, h);
  for (double& v : img.data) v = uniform(rng);
  return img;
}

// Images with a few flat patches plus mild noise, so segmentation produces
// several regions of varied sizes instead of pure speckle.
inline RgbImage patchy_image(Rng& rng, int w, int h, int patches = 3, double noise = 0.05) {
  RgbImage img(w, h);
  std::vector<std::array<double, 3>> colors(static_cast<std::size_t>(patches));
  std::vector<std::pair<int, int>> centers(static_cast<std::size_t>(patches));
  for (int k = 0; k < patches; ++k) {
    for (double& c : colors[static_cast<std::size_t>(k)]) c = uniform(rng);
    centers[static_cast<std::size_t>(k)] = {uniform_int(rng, 0, w - 1), uniform_int(rng, 0, h - 1)};
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int best = 0;
      int best_d = 1 << 30;
      for (int k = 0; k < patches; ++k) {
        const auto [cx, cy] = centers[static_cast<std::size_t>(k)];
        const int d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (int ch = 0; ch < 3; ++ch) {
        const double v = colors[static_cast<std::size_t>(best)][static_cast<std::size_t>(ch)] +
                         uniform(rng, -noise, noise);
        img.at(i, ch) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return img;
}

inline ProbGrid random_probs(Rng& rng, int w, int h, int c) {
  ProbGrid p(w, h, c);
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    for (int k = 0; k < c; ++k) p.at(i, k) = uniform(rng, 0.05, 1.0);
  }
  p.normalize();
  return p;
}

inline LabelGrid random_labels(Rng& rng, int w, int h, int c, double labeled_fraction) {
  LabelGrid y(w, h, c);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (uniform(rng) < labeled_fraction) y.set(i, static_cast<Label>(uniform_int(rng, 0, c - 1)));
  }
  return y;
}

inline AffinityGraph random_graph(Rng& rng, int w, int h) {
  AffinityGraph g(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) g.right[i] = uniform(rng, 0.0, 2.0);
      if (y + 1 < h) g.down[i] = uniform(rng, 0.0, 2.0);
    }
  }
  return g;
}

inline AffinityField random_gates(Rng& rng, int w, int h) {
  AffinityField f(w, h);
  for (auto& field : f.gates) {
    for (double& g : field) g = uniform(rng, 0.0, kGateMax);
  }
  return f;
}

// Dense symmetric adjacency matrix of a 4-neighbor graph, row-major N x N.
inline std::vector<double> dense_adjacency(const AffinityGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t w = static_cast<std::size_t>(g.width);
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % w + 1 < w) m[i * n + i + 1] = m[(i + 1) * n + i] = g.right[i];
    if (i + w < n) m[i * n + i + w] = m[(i + w) * n + i] = g.down[i];
  }
  return m;
}

// Sum over channels of a_c^T (D - W) b_c with D and W assembled densely.
inline double dense_laplacian_form(const AffinityGraph& g, const ProbGrid& a, const ProbGrid& b) {
  const std::size_t n = g.vertex_count();
  const auto w = dense_adjacency(g);
  std::vector<double> lap(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += w[i * n + j];
    for (std::size_t j = 0; j < n; ++j) lap[i * n + j] = (i == j ? deg : 0.0) - w[i * n + j];
  }
  double total = 0.0;
  for (int c = 0; c < a.num_classes(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += lap[i * n + j] * b.at(j, c);
      total += a.at(i, c) * row;
    }
  }
  return total;
}

// Unrolled operator of one directional scan for one gate field: row i holds
// the weights with which h_i depends on every input pixel.
inline std::vector<double> dense_scan_operator(const AffinityField& gates, ScanDirection d,
                                               int group) {
  const int w = gates.width;
  const int h = gates.height;
  const std::size_t n = gates.pixel_count();
  const auto& field = gates.gates[static_cast<std::size_t>(gate_field(d, group))];
  std::vector<double> op(n * n, 0.0);
  // Visit pixels in scan order so every predecessor row is ready in time.
  std::vector<std::pair<int, int>> order;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) order.emplace_back(x, y);
  }
  if (d == ScanDirection::kRightToLeft || d == ScanDirection::kBottomToTop) {
    std::reverse(order.begin(), order.end());
  }
  for (const auto& [x, y] : order) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    const bool first = (d == ScanDirection::kLeftToRight && x == 0) ||
                       (d == ScanDirection::kRightToLeft && x == w - 1) ||
                       (d == ScanDirection::kTopToBottom && y == 0) ||
                       (d == ScanDirection::kBottomToTop && y == h - 1);
    if (first) {
      op[i * n + i] = 1.0;
      continue;
    }
    std::size_t prev = i;
    switch (d) {
      case ScanDirection::kLeftToRight: prev = i - 1; break;
      case ScanDirection::kRightToLeft: prev = i + 1; break;
      case ScanDirection::kTopToBottom: prev = i - static_cast<std::size_t>(w); break;
      case ScanDirection::kBottomToTop: prev = i + static_cast<std::size_t>(w); break;
    }
    const double g = field[i];
    for (std::size_t j = 0; j < n; ++j) op[i * n + j] = g * op[prev * n + j];
    op[i * n + i] += 1.0 - g;
  }
  return op;
}

// Dense G applied channel by channel: the mean of the four unrolled scans of
// the channel's gate group, followed by per-pixel renormalization.
inline ProbGrid dense_propagate(const AffinityField& gates, const ProbGrid& alpha) {
  const std::size_t n = gates.pixel_count();
  const int c_count = alpha.num_classes();
  ProbGrid out(alpha.width(), alpha.height(), c_count);
  for (int c = 0; c < c_count; ++c) {
    std::vector<double> g_dense(n * n, 0.0);
    for (int d = 0; d < kScanDirections; ++d) {
      const auto op = dense_scan_operator(gates, static_cast<ScanDirection>(d), c % 3);
      for (std::size_t k = 0; k < n * n; ++k) g_dense[k] += 0.25 * op[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += g_dense[i * n + j] * alpha.at(j, c);
      out.at(i, c) = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < c_count; ++c) s += out.at(i, c);
    for (int c = 0; c < c_count; ++c) out.at(i, c) /= s;
  }
  return out;
}

// Graph segmentation by explicit component bookkeeping: every merge relabels
// all member pixels and tracks the largest merged edge as the internal
// difference. Edges are ordered by (weight, row, col, direction).
inline std::vector<int> felzenszwalb_oracle(const RgbImage& img, double k, int min_size) {
  const int w = img.width;
  const int h = img.height;
  const std::size_t n = img.pixel_count();
  struct E {
    double weight;
    int y, x, dir;
    std::size_t a, b;
  };
  std::vector<E> edges;
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      const double d = 255.0 * (img.at(a, ch) - img.at(b, ch));
      s += d * d;
    }
    return std::sqrt(s);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) edges.push_back({dist(i, i + 1), y, x, 0, i, i + 1});
      if (y + 1 < h) edges.push_back({dist(i, i + w), y, x, 1, i, i + static_cast<std::size_t>(w)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const E& l, const E& r) {
    return std::tie(l.weight, l.y, l.x, l.dir) < std::tie(r.weight, r.y, r.x, r.dir);
  });

  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::vector<double> internal(n, 0.0);
  std::vector<std::size_t> size(n, 1);
  auto merge = [&](int keep, int drop, double weight) {
    for (int& c : comp) {
      if (c == drop) c = keep;
    }
    size[static_cast<std::size_t>(keep)] += size[static_cast<std::size_t>(drop)];
    internal[static_cast<std::size_t>(keep)] =
        std::max({internal[static_cast<std::size_t>(keep)],
                  internal[static_cast<std::size_t>(drop)], weight});
  };
  for (const E& e : edges) {
    const int a = comp[e.a];
    const int b = comp[e.b];
    if (a == b) continue;
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    const double mint = std::min(internal[ua] + k / static_cast<double>(size[ua]),
                                 internal[ub] + k / static_cast<double>(size[ub]));
    if (e.weight <= mint) merge(a, b, e.weight);
  }
  for (const E& e : edges) {
    const int a = comp[e.a];
    const int b = comp[e.b];
    if (a == b) continue;
    if (size[static_cast<std::size_t>(a)] < static_cast<std::size_t>(min_size) ||
        size[static_cast<std::size_t>(b)] < static_cast<std::size_t>(min_size)) {
      merge(a, b, e.weight);
    }
  }
  // Relabel by first appearance in raster order.
  std::vector<int> remap(n, -1);
  std::vector<int> out(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = remap[static_cast<std::size_t>(comp[i])];
    if (r < 0) r = next++;
    out[i] = r;
  }
  return out;
}

struct GradientCheck {
  double worst_relative = 0.0;
  std::size_t worst_index = 0;
};

// Central differences of `f` at `x` compared against `analytic`. The relative
// error uses max(|fd|, |analytic|) with an absolute floor so that parameters
// with vanishing gradient do not blow up the ratio.
inline GradientCheck check_gradient(const std::function<double(std::span<const double>)>& f,
                                    std::vector<double> x, std::span<const double> analytic,
                                    double step = 1e-5, double floor = 1e-7) {
  GradientCheck out;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + step;
    const double up = f(x);
    x[k] = keep - step;
    const double down = f(x);
    x[k] = keep;
    const double fd = (up - down) / (2.0 * step);
    const double rel = std::abs(fd - analytic[k]) /
                       std::max({std::abs(fd), std::abs(analytic[k]), floor});
    if (rel > out.worst_relative) {
      out.worst_relative = rel;
      out.worst_index = k;
    }
  }
  return out;
}

}  // namespace wsseg::testing
