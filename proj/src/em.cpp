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

#include "wsseg/em.hpp"

#include <algorithm>

#include "wsseg/energy.hpp"
#include "wsseg/error.hpp"

namespace wsseg {
namespace {

std::vector<LabelGrid> argmax_all(const std::vector<ProbGrid>& alpha) {
  std::vector<LabelGrid> out;
  out.reserve(alpha.size());
  for (const auto& a : alpha) out.push_back(a.argmax());
  return out;
}

void validate(const RunConfig& c) {
  if (c.max_steps < 1) throw Error("max_steps must be at least 1");
  if (!(c.vote_majority > 0.5 && c.vote_majority <= 1.0)) {
    throw Error("vote_majority must lie in (0.5, 1]");
  }
  if (!(c.lambda_smooth >= 0.0)) throw Error("lambda_smooth must be non-negative");
}

}  // namespace

EmDriver::EmDriver(const Corpus& corpus, RunConfig config)
    : corpus_(corpus), config_(std::move(config)) {
  validate(config_);
  if (corpus_.items.empty()) throw Error("EM: empty corpus");
  if (!(config_.mining_threshold > 1.0 / corpus_.num_classes && config_.mining_threshold < 1.0)) {
    throw Error("mining_threshold must lie in (1/C, 1)");
  }
  prepared_.reserve(corpus_.items.size());
  for (const auto& item : corpus_.items) {
    if (item.seeds.size() != item.image.pixel_count()) {
      throw Error("EM: image " + item.name + " has no seed map");
    }
    PreparedImage p;
    p.features = extract_features(item.image);
    p.superpixels = segment(item.image, config_.superpixel_scale, config_.superpixel_min_size);
    p.region_features = region_features(item.image, p.superpixels);
    prepared_.push_back(std::move(p));
  }
}

Metrics EmDriver::score(const std::vector<LabelGrid>& labels) const {
  SegmentationScorer scorer(corpus_.num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) scorer.add(labels[i], corpus_.items[i].gt);
  return scorer.result();
}

double EmDriver::corpus_energy(const PairwiseParams& params,
                               const std::vector<ProbGrid>& alpha) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const AffinityGraph graph = graph_from_gates(compute_gates(params, prepared_[i].features));
    sum += normalized_energy(graph, alpha[i]);
  }
  return sum / static_cast<double>(alpha.size());
}

std::vector<ProbGrid> EmDriver::predict_all(const UnaryParams& params) const {
  std::vector<ProbGrid> out;
  out.reserve(prepared_.size());
  for (const auto& p : prepared_) out.push_back(predict(params, p.features));
  return out;
}

std::vector<ProbGrid> EmDriver::propagate_all(const PairwiseParams& params,
                                              const std::vector<ProbGrid>& alpha_u) const {
  if (!config_.pairwise) return alpha_u;
  std::vector<ProbGrid> out;
  out.reserve(alpha_u.size());
  for (std::size_t i = 0; i < alpha_u.size(); ++i) {
    out.push_back(propagate(compute_gates(params, prepared_[i].features), alpha_u[i]));
  }
  return out;
}

UnaryParams EmDriver::fit_unary(EmState& state, const UnaryParams& init,
                                const std::vector<LabelGrid>& labels) const {
  std::vector<LabeledPixels> data;
  data.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    data.push_back({&prepared_[i].features, &labels[i]});
  }
  auto result = train_unary(init, data, config_.unary);
  state.unary_loss = std::move(result.loss_history);
  return std::move(result.params);
}

PairwiseParams EmDriver::fit_pairwise(EmState& state, const PairwiseParams& init,
                                      const std::vector<ProbGrid>& alpha_u,
                                      const std::vector<LabelGrid>& labels) const {
  std::vector<PairwiseSample> samples;
  samples.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    samples.push_back({&prepared_[i].features, &alpha_u[i], &labels[i], &prepared_[i].superpixels});
  }
  PairwiseTrainConfig cfg{config_.pairwise_descent, config_.lambda_smooth};
  auto result = train_pairwise(init, samples, cfg);
  state.pairwise_loss = std::move(result.loss_history);
  return std::move(result.params);
}

std::vector<LabelGrid> EmDriver::mine(EmState& state, const std::vector<ProbGrid>& alpha_u) const {
  const std::vector<LabelGrid> unary_labels = argmax_all(alpha_u);
  if (!config_.mining) return unary_labels;

  RegionDataset dataset;
  dataset.num_classes = corpus_.num_classes;
  for (std::size_t i = 0; i < prepared_.size(); ++i) {
    const auto& p = prepared_[i];
    const auto votes = region_label_vote(p.superpixels, unary_labels[i], config_.vote_majority);
    for (int r = 0; r < p.superpixels.region_count; ++r) {
      const Label v = votes[static_cast<std::size_t>(r)];
      if (v == kUnknown) continue;
      const auto row = p.region_features.row(r);
      dataset.rows.insert(dataset.rows.end(), row.begin(), row.end());
      dataset.labels.push_back(v);
    }
  }
  if (dataset.size() == 0) throw Error("mining: no region passes the majority vote");
  auto trained = train_region_classifier(dataset, config_.region);
  state.region = std::move(trained.params);
  state.region_loss = std::move(trained.loss_history);

  std::vector<LabelGrid> out;
  out.reserve(prepared_.size());
  for (const auto& p : prepared_) {
    out.push_back(mine_confident(p.superpixels, state.region, p.region_features,
                                 config_.mining_threshold));
  }
  return out;
}

EmState EmDriver::initialize() const {
  EmState state;
  state.step = 0;
  state.mined.reserve(corpus_.items.size());
  for (const auto& item : corpus_.items) state.mined.push_back(item.seeds);
  std::size_t labeled = 0;
  for (const auto& m : state.mined) labeled += m.labeled_count();
  if (labeled == 0) throw Error("initialize: seed maps contain no labeled pixel");

  std::vector<const PixelFeatures*> features;
  std::vector<LabeledPixels> pixels;
  for (std::size_t i = 0; i < prepared_.size(); ++i) {
    features.push_back(&prepared_[i].features);
    pixels.push_back({&prepared_[i].features, &state.mined[i]});
  }
  state.pairwise = PairwiseParams::zeros();
  state.pairwise.scaling = fit_gate_scaling(features);
  UnaryParams unary = UnaryParams::zeros(corpus_.num_classes);
  unary.scaling = fit_unary_scaling(pixels);

  Metrics seeds = score(state.mined);
  std::vector<ProbGrid> seed_probs;
  seed_probs.reserve(state.mined.size());
  for (const auto& m : state.mined) seed_probs.push_back(ProbGrid::one_hot(m));
  seeds.energy = corpus_energy(state.pairwise, seed_probs);
  state.records.push_back({0, "seeds", seeds});

  state.unary = fit_unary(state, unary, state.mined);
  state.alpha_u = predict_all(state.unary);
  state.init_unary = score(argmax_all(state.alpha_u));
  if (config_.pairwise) {
    state.pairwise = fit_pairwise(state, state.pairwise, state.alpha_u, state.mined);
  }
  state.init_unary.energy = corpus_energy(state.pairwise, state.alpha_u);
  state.alpha_p = propagate_all(state.pairwise, state.alpha_u);
  return state;
}

EmState EmDriver::em_step(const EmState& prev) const {
  EmState state = prev;
  const int t = prev.step + 1;
  state.step = t;
  try {
    // M-step, unary: supervised by the refined map of the previous step, or
    // directly by the mined regions when the pairwise network is disabled.
    std::vector<LabelGrid> targets;
    if (config_.pairwise) {
      targets.reserve(prev.alpha_p.size());
      for (const auto& a : prev.alpha_p) targets.push_back(harden(a));
    } else {
      targets = prev.mined;
    }
    state.unary = fit_unary(state, prev.unary, targets);
    state.alpha_u = predict_all(state.unary);
    Metrics unary = score(argmax_all(state.alpha_u));
    unary.energy = corpus_energy(prev.pairwise, state.alpha_u);
    state.records.push_back({t, "unary", unary});

    state.mined = mine(state, state.alpha_u);
    Metrics mined = score(state.mined);
    std::vector<ProbGrid> filled;
    filled.reserve(state.mined.size());
    for (std::size_t i = 0; i < state.mined.size(); ++i) {
      filled.push_back(ProbGrid::one_hot(state.mined[i], &state.alpha_u[i]));
    }
    mined.energy = corpus_energy(prev.pairwise, filled);
    state.records.push_back({t, "mined", mined});

    if (config_.pairwise) {
      state.pairwise = fit_pairwise(state, prev.pairwise, state.alpha_u, state.mined);
    }
    // E-step with the new affinities.
    state.alpha_p = propagate_all(state.pairwise, state.alpha_u);
    Metrics pairwise = score(argmax_all(state.alpha_p));
    pairwise.energy = corpus_energy(state.pairwise, state.alpha_p);
    state.records.push_back({t, "pairwise", pairwise});

    std::size_t holds = 0;
    for (std::size_t i = 0; i < prepared_.size(); ++i) {
      const AffinityGraph graph =
          graph_from_gates(compute_gates(state.pairwise, prepared_[i].features));
      if (mining_inequality_holds(graph, state.mined[i], state.alpha_u[i]).holds) ++holds;
    }
    state.inequality_fraction.push_back(static_cast<double>(holds) /
                                        static_cast<double>(prepared_.size()));
  } catch (const DivergenceError& e) {
    throw DivergenceError("EM step " + std::to_string(t) + " " + e.stage(), e.iteration(),
                          e.what());
  }
  return state;
}

EmState EmDriver::run(const std::function<void(const StageRecord&)>& on_record,
                      const std::function<void(const EmState&)>& on_step) const {
  EmState state = initialize();
  std::size_t emitted = 0;
  auto flush = [&] {
    for (; emitted < state.records.size(); ++emitted) {
      if (on_record) on_record(state.records[emitted]);
    }
  };
  flush();
  double previous = -1.0;
  for (int t = 1; t <= config_.max_steps; ++t) {
    state = em_step(state);
    flush();
    if (on_step) on_step(state);
    const double current = state.records.back().metrics.mean_iou;
    if (config_.early_stop && t > 1 && current - previous < config_.min_gain) break;
    previous = current;
  }
  return state;
}

ProbGrid EmDriver::infer(const UnaryParams& unary, const PairwiseParams* pairwise,
                         const RgbImage& image) {
  const PixelFeatures features = extract_features(image);
  ProbGrid alpha_u = predict(unary, features);
  if (pairwise == nullptr) return alpha_u;
  return propagate(compute_gates(*pairwise, features), alpha_u);
}

std::vector<double> stage_series(const EmState& state, const std::string& stage,
                                 double Metrics::*field) {
  std::vector<double> out;
  for (const auto& r : state.records) {
    if (r.stage == stage) out.push_back(r.metrics.*field);
  }
  return out;
}

}  // namespace wsseg
