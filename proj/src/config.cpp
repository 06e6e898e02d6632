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

#include "wsseg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "wsseg/error.hpp"

namespace wsseg {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double as_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

long long as_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

double in_range(const std::string& key, double v, double lo, double hi, bool lo_open,
                bool hi_open) {
  const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  if (!ok) {
    std::ostringstream msg;
    msg << "value " << v << " outside " << (lo_open ? '(' : '[') << lo << ", " << hi
        << (hi_open ? ')' : ']');
    throw ConfigError(key, msg.str());
  }
  return v;
}

int int_range(const std::string& key, long long v, long long lo, long long hi) {
  if (v < lo || v > hi) {
    throw ConfigError(key, "value " + std::to_string(v) + " outside [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"steps", "5", "maximum number of EM iterations (>= 1)"},
      {"early_stop", "1", "stop when the pairwise mIoU gain drops below early_stop_points"},
      {"early_stop_points", "0.2", "minimum per-step mIoU gain in points"},
      {"mining_threshold", "0.7", "confidence a region must exceed to be mined, in (1/C, 1)"},
      {"vote_majority", "0.8", "strict majority fraction for region training labels, in (0.5, 1]"},
      {"lambda_smooth", "0.1",
       "weight of the region smoothness loss"},
      {"mining", "1", "mine confident regions (0 supervises the pairwise net with the unary argmax)"},
      {"pairwise", "1", "train the pairwise affinity network (0 retrains unary on mined regions)"},
      {"seed", "42", "seed for corpus generation and seed-map corruption"},
      {"sp_scale", "100", "graph segmentation scale k on a 0-255 color scale"},
      {"sp_min_size", "16", "minimum superpixel size in pixels"},
      {"momentum", "0.9", "momentum of every gradient-descent optimizer"},
      {"unary_base_lr", "0.001", "unary polynomial schedule base rate"},
      {"unary_power", "0.9", "unary polynomial schedule power"},
      {"unary_iters", "500", "unary iterations per EM step"},
      {"unary_lr_gain", "200", "multiplier on the unary schedule"},
      {"pairwise_base_lr", "0.00001", "pairwise polynomial schedule base rate"},
      {"pairwise_power", "0.5", "pairwise polynomial schedule power"},
      {"pairwise_iters", "100", "pairwise iterations per EM step"},
      {"pairwise_lr_gain", "200000", "multiplier on the pairwise schedule"},
      {"region_base_lr", "0.001", "region classifier step schedule base rate"},
      {"region_gamma", "0.1", "region classifier step schedule decay factor"},
      {"region_step", "400", "region classifier step schedule step size"},
      {"region_iters", "500", "region classifier iterations per EM step"},
      {"region_lr_gain", "100", "multiplier on the region schedule"},
      {"images", "100", "number of generated images"},
      {"width", "64", "generated image width"},
      {"height", "64", "generated image height"},
      {"classes", "4", "class count including background"},
      {"min_shapes", "1", "minimum objects per image"},
      {"max_shapes", "3", "maximum objects per image"},
      {"min_radius", "8", "smallest object half-extent in pixels"},
      {"max_radius", "18", "largest object half-extent in pixels"},
      {"shading", "0.3", "blend weight of object rims into the background, in [0, 0.95]"},
      {"noise", "0.1", "per-pixel object noise amplitude"},
      {"background_noise", "0.08", "per-pixel background noise amplitude"},
      {"background_ramp", "0.2", "background gradient amplitude"},
      {"spot_density", "0.15", "expected fraction of the image covered by dark spots, in [0, 0.5]"},
      {"spot_radius", "2", "largest dark spot radius in pixels, in [1, 8]"},
      {"seed_erode_radius", "1", "seed erosion radius in pixels"},
      {"seed_flip_rate", "0.3", "fraction of seed pixels flipped to a wrong class, in [0, 0.3]"},
      {"seed_coverage", "0.6", "fraction of eroded region pixels kept as seeds, in (0, 1]"},
      {"corpus", "corpus", "corpus directory"},
      {"out", "out", "output directory"},
  };
  return keys;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(number) + ": expected key=value");
    }
    out.emplace_back(trim(std::string_view(body).substr(0, eq)),
                     trim(std::string_view(body).substr(eq + 1)));
  }
  return out;
}

CliConfig resolve_config(const KeyValues& file_values, const KeyValues& overrides) {
  std::map<std::string, std::string> values;
  for (const auto& k : config_keys()) values[k.name] = k.default_value;
  for (const KeyValues* layer : {&file_values, &overrides}) {
    for (const auto& [key, value] : *layer) {
      if (!values.contains(key)) throw ConfigError(key, "unknown key");
      values[key] = value;
    }
  }
  auto d = [&](const char* k) { return as_double(k, values.at(k)); };
  auto i = [&](const char* k) { return as_int(k, values.at(k)); };
  auto b = [&](const char* k) { return as_bool(k, values.at(k)); };

  CliConfig cfg;
  RunConfig& run = cfg.run;
  run.max_steps = int_range("steps", i("steps"), 1, 1000);
  run.early_stop = b("early_stop");
  run.min_gain = in_range("early_stop_points", d("early_stop_points"), 0, 100, false, false) / 100.0;
  run.vote_majority = in_range("vote_majority", d("vote_majority"), 0.5, 1.0, true, false);
  run.lambda_smooth = in_range("lambda_smooth", d("lambda_smooth"), 0, 1e6, false, false);
  run.mining = b("mining");
  run.pairwise = b("pairwise");
  const long long seed = i("seed");
  if (seed < 0) throw ConfigError("seed", "must be non-negative");
  run.seed = static_cast<std::uint64_t>(seed);
  run.superpixel_scale = in_range("sp_scale", d("sp_scale"), 0, 1e9, true, false);
  run.superpixel_min_size = int_range("sp_min_size", i("sp_min_size"), 1, 1 << 30);
  const double momentum = in_range("momentum", d("momentum"), 0, 1, false, true);

  const int unary_iters = int_range("unary_iters", i("unary_iters"), 1, 10000000);
  run.unary = {LrSchedule::polynomial(in_range("unary_base_lr", d("unary_base_lr"), 0, 1e6, true, false),
                                      in_range("unary_power", d("unary_power"), 0, 100, true, false),
                                      unary_iters),
               in_range("unary_lr_gain", d("unary_lr_gain"), 0, 1e12, true, false), momentum,
               unary_iters};
  const int pairwise_iters = int_range("pairwise_iters", i("pairwise_iters"), 1, 10000000);
  run.pairwise_descent = {
      LrSchedule::polynomial(in_range("pairwise_base_lr", d("pairwise_base_lr"), 0, 1e6, true, false),
                             in_range("pairwise_power", d("pairwise_power"), 0, 100, true, false),
                             pairwise_iters),
      in_range("pairwise_lr_gain", d("pairwise_lr_gain"), 0, 1e12, true, false), momentum,
      pairwise_iters};
  const int region_iters = int_range("region_iters", i("region_iters"), 1, 10000000);
  run.region = {LrSchedule::step(in_range("region_base_lr", d("region_base_lr"), 0, 1e6, true, false),
                                 in_range("region_gamma", d("region_gamma"), 0, 1, true, false),
                                 int_range("region_step", i("region_step"), 1, 10000000),
                                 region_iters),
                in_range("region_lr_gain", d("region_lr_gain"), 0, 1e12, true, false), momentum,
                region_iters};

  SceneSpec& scene = cfg.scene;
  cfg.images = int_range("images", i("images"), 1, 1000000);
  scene.width = int_range("width", i("width"), 8, 4096);
  scene.height = int_range("height", i("height"), 8, 4096);
  scene.num_classes = int_range("classes", i("classes"), 2, kMaxClasses);
  scene.min_shapes = int_range("min_shapes", i("min_shapes"), 1, 100);
  scene.max_shapes = int_range("max_shapes", i("max_shapes"), scene.min_shapes, 100);
  scene.min_radius = in_range("min_radius", d("min_radius"), 1, 4096, false, false);
  scene.max_radius = in_range("max_radius", d("max_radius"), scene.min_radius, 4096, false, false);
  scene.shading = in_range("shading", d("shading"), 0, 0.95, false, false);
  scene.noise = in_range("noise", d("noise"), 0, 1, false, false);
  scene.background_noise = in_range("background_noise", d("background_noise"), 0, 1, false, false);
  scene.background_ramp = in_range("background_ramp", d("background_ramp"), 0, 1, false, false);
  scene.spot_density = in_range("spot_density", d("spot_density"), 0, 0.5, false, false);
  scene.spot_radius = in_range("spot_radius", d("spot_radius"), 1, 8, false, false);
  scene.seed = run.seed;

  SeedSpec& seeds = cfg.seeds;
  seeds.erode_radius = int_range("seed_erode_radius", i("seed_erode_radius"), 0, 4096);
  seeds.flip_rate = in_range("seed_flip_rate", d("seed_flip_rate"), 0, 0.3, false, false);
  seeds.coverage = in_range("seed_coverage", d("seed_coverage"), 0, 1, true, false);
  seeds.seed = run.seed;

  run.mining_threshold = in_range("mining_threshold", d("mining_threshold"),
                                  1.0 / scene.num_classes, 1.0, true, true);

  cfg.corpus_dir = values.at("corpus");
  cfg.out_dir = values.at("out");
  for (const auto& k : config_keys()) cfg.resolved.emplace_back(k.name, values.at(k.name));
  return cfg;
}

}  // namespace wsseg
