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

// Command-line front end: corpus generation, EM runs, inference, evaluation
// and affinity visualization. All algorithmic work lives in the library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wsseg/config.hpp"
#include "wsseg/em.hpp"
#include "wsseg/error.hpp"
#include "wsseg/pnm.hpp"
#include "wsseg/report.hpp"
#include "wsseg/superpixel.hpp"
#include "wsseg/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitConfig = 3;

std::string flag_name(const std::string& key) {
  std::string out = "--";
  for (char c : key) out += c == '_' ? '-' : c;
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw wsseg::ConfigError("config", "cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct Flags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool no_mining = false;
  bool no_pairwise = false;
  std::string params_dir;
  std::string image_path;
  std::string pred_dir;
  int limit = 0;
};

wsseg::CliConfig load_config(const Flags& flags, const CLI::App& app) {
  wsseg::KeyValues overrides;
  for (const auto& key : wsseg::config_keys()) {
    if (app.get_option(flag_name(key.name))->count() > 0) {
      overrides.emplace_back(key.name, flags.values.at(key.name));
    }
  }
  if (flags.no_mining) overrides.emplace_back("mining", "0");
  if (flags.no_pairwise) overrides.emplace_back("pairwise", "0");
  const std::string text = flags.config_file.empty() ? "" : read_file(flags.config_file);
  return wsseg::parse_config(text, overrides);
}

wsseg::Corpus corpus_for(const wsseg::CliConfig& cfg) {
  if (fs::exists(fs::path(cfg.corpus_dir) / "corpus.cfg")) {
    return wsseg::load_corpus(cfg.corpus_dir);
  }
  std::cerr << "no corpus at " << cfg.corpus_dir << ", generating it in memory\n";
  return wsseg::make_corpus(cfg.scene, cfg.seeds, cfg.images);
}

void print_metrics(const char* label, const wsseg::Metrics& m) {
  std::printf("%s mIoU %.4f precision %.4f\n", label, m.mean_iou, m.precision);
}

int cmd_gen(const wsseg::CliConfig& cfg) {
  const wsseg::Corpus corpus = wsseg::make_corpus(cfg.scene, cfg.seeds, cfg.images);
  wsseg::save_corpus(cfg.corpus_dir, corpus);
  wsseg::SegmentationScorer scorer(corpus.num_classes);
  for (const auto& item : corpus.items) scorer.add(item.seeds, item.gt);
  std::printf("wrote %zu images to %s\n", corpus.items.size(), cfg.corpus_dir.c_str());
  print_metrics("seeds", scorer.result());
  return kExitOk;
}

int cmd_run(const wsseg::CliConfig& cfg) {
  const wsseg::Corpus corpus = corpus_for(cfg);
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  {
    std::ofstream resolved(out / "config.txt");
    for (const auto& [k, v] : cfg.resolved) resolved << k << '=' << v << '\n';
  }
  wsseg::EmDriver driver(corpus, cfg.run);
  std::printf("%s\n", wsseg::kMetricsHeader);
  const wsseg::EmState state = driver.run(
      [](const wsseg::StageRecord& r) {
        std::printf("%s\n", wsseg::metrics_row(r).c_str());
        std::fflush(stdout);
      },
      [&](const wsseg::EmState& s) {
        wsseg::save_step_params(out / ("step_" + std::to_string(s.step)), s);
      });
  wsseg::save_run_report(out, state);
  std::printf("%s", wsseg::summary_text(state).c_str());
  return kExitOk;
}

struct LoadedParams {
  wsseg::UnaryParams unary;
  wsseg::PairwiseParams pairwise;
};

LoadedParams load_params(const std::string& dir) {
  if (dir.empty()) throw wsseg::ConfigError("params", "--params DIR is required");
  const fs::path p = dir;
  return {wsseg::unary_from_named_values(wsseg::load_named_values(p / "unary.csv")),
          wsseg::pairwise_from_named_values(wsseg::load_named_values(p / "pairwise.csv"))};
}

int cmd_infer(const wsseg::CliConfig& cfg, const Flags& flags) {
  const LoadedParams params = load_params(flags.params_dir);
  const wsseg::PairwiseParams* pairwise = cfg.run.pairwise ? &params.pairwise : nullptr;
  const fs::path out = fs::path(cfg.out_dir) / "infer";
  fs::create_directories(out);
  if (!flags.image_path.empty()) {
    const wsseg::RgbImage image = wsseg::pnm::load_ppm(flags.image_path);
    const auto labels = wsseg::EmDriver::infer(params.unary, pairwise, image).argmax();
    const fs::path target = out / fs::path(flags.image_path).filename().replace_extension(".pgm");
    wsseg::pnm::save_labels(target, labels);
    std::printf("wrote %s\n", target.c_str());
    return kExitOk;
  }
  const wsseg::Corpus corpus = corpus_for(cfg);
  wsseg::SegmentationScorer scorer(corpus.num_classes);
  for (const auto& item : corpus.items) {
    const auto labels = wsseg::EmDriver::infer(params.unary, pairwise, item.image).argmax();
    wsseg::pnm::save_labels(out / (item.name + ".pgm"), labels);
    scorer.add(labels, item.gt);
  }
  std::printf("wrote %zu label maps to %s\n", corpus.items.size(), out.c_str());
  print_metrics("inference", scorer.result());
  return kExitOk;
}

int cmd_eval(const wsseg::CliConfig& cfg, const Flags& flags) {
  if (flags.pred_dir.empty()) throw wsseg::ConfigError("pred", "--pred DIR is required");
  const wsseg::Corpus corpus = wsseg::load_corpus(cfg.corpus_dir);
  wsseg::SegmentationScorer scorer(corpus.num_classes);
  for (const auto& item : corpus.items) {
    const fs::path path = fs::path(flags.pred_dir) / (item.name + ".pgm");
    scorer.add(wsseg::pnm::load_labels(path, corpus.num_classes), item.gt);
  }
  const wsseg::Metrics m = scorer.result();
  print_metrics("eval", m);
  for (std::size_t c = 0; c < m.per_class_iou.size(); ++c) {
    std::printf("  class %zu IoU %.4f\n", c, m.per_class_iou[c]);
  }
  return kExitOk;
}

int cmd_viz(const wsseg::CliConfig& cfg, const Flags& flags) {
  const LoadedParams params = load_params(flags.params_dir);
  const wsseg::Corpus corpus = corpus_for(cfg);
  const fs::path out = fs::path(cfg.out_dir) / "viz";
  fs::create_directories(out);
  const std::size_t n = flags.limit > 0
                            ? std::min(corpus.items.size(), static_cast<std::size_t>(flags.limit))
                            : corpus.items.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& item = corpus.items[i];
    const wsseg::PixelFeatures features = wsseg::extract_features(item.image);
    const wsseg::AffinityField gates = wsseg::compute_gates(params.pairwise, features);
    wsseg::save_affinity_maps(out, item.name, gates);
    const wsseg::ProbGrid alpha_u = wsseg::predict(params.unary, features);
    wsseg::pnm::save_labels(out / (item.name + "_unary.pgm"), alpha_u.argmax());
    wsseg::pnm::save_labels(out / (item.name + "_pairwise.pgm"),
                            wsseg::propagate(gates, alpha_u).argmax());
    const auto sp = wsseg::segment(item.image, cfg.run.superpixel_scale,
                                   cfg.run.superpixel_min_size);
    wsseg::save_superpixels(out / (item.name + "_superpixels.pgm"),
                            out / (item.name + "_superpixels.csv"), sp);
  }
  std::printf("wrote visualizations for %zu images to %s\n", n, out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised segmentation with learned affinity propagation"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config_file, "key=value configuration file");
  for (const auto& key : wsseg::config_keys()) {
    app.add_option(flag_name(key.name), flags.values[key.name],
                   key.help + " (default " + key.default_value + ")");
  }
  app.add_flag("--no-mining", flags.no_mining,
               "supervise the pairwise network with the unary argmax instead of mined regions");
  app.add_flag("--no-pairwise", flags.no_pairwise,
               "skip affinity learning and retrain the unary network on mined regions");

  auto* gen = app.add_subcommand("gen", "generate the synthetic corpus");
  auto* run = app.add_subcommand("run", "run the full EM procedure");
  auto* infer = app.add_subcommand("infer", "apply saved parameters to images");
  infer->add_option("--params", flags.params_dir, "directory holding unary.csv and pairwise.csv");
  infer->add_option("--image", flags.image_path, "single P6 image (default: the whole corpus)");
  auto* eval = app.add_subcommand("eval", "score label maps against corpus ground truth");
  eval->add_option("--pred", flags.pred_dir, "directory of NNNN.pgm label maps");
  auto* viz = app.add_subcommand("viz", "dump affinity fields and stage label maps");
  viz->add_option("--params", flags.params_dir, "directory holding unary.csv and pairwise.csv");
  viz->add_option("--limit", flags.limit, "only the first N images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const wsseg::CliConfig cfg = load_config(flags, app);
    if (gen->parsed()) return cmd_gen(cfg);
    if (run->parsed()) return cmd_run(cfg);
    if (infer->parsed()) return cmd_infer(cfg, flags);
    if (eval->parsed()) return cmd_eval(cfg, flags);
    if (viz->parsed()) return cmd_viz(cfg, flags);
  } catch (const wsseg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wsseg::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
