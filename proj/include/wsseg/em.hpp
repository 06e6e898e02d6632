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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wsseg/grid.hpp"
#include "wsseg/miner.hpp"
#include "wsseg/optim.hpp"
#include "wsseg/propagation.hpp"
#include "wsseg/superpixel.hpp"
#include "wsseg/synth.hpp"
#include "wsseg/unary.hpp"

namespace wsseg {

/// Everything that steers one EM run.
struct RunConfig {
  int max_steps = 5;
  /// Stop once the pairwise-stage corpus mIoU gains less than min_gain
  /// (as a fraction, 0.002 = 0.2 points) over the previous step.
  bool early_stop = true;
  double min_gain = 0.002;
  double mining_threshold = 0.7;
  double vote_majority = 0.8;
  double lambda_smooth = 0.1;
  /// Ablation switches: without mining the pairwise network is supervised by
  /// the unary argmax; without the pairwise network the unary network is
  /// retrained directly on the mined regions and propagation is the identity.
  bool mining = true;
  bool pairwise = true;
  std::uint64_t seed = 42;
  double superpixel_scale = 100.0;
  int superpixel_min_size = 16;

  DescentConfig unary{LrSchedule::polynomial(1e-3, 0.9, 500), 200.0, 0.9, 500};
  DescentConfig pairwise_descent{LrSchedule::polynomial(1e-5, 0.5, 100), 200000.0, 0.9, 100};
  DescentConfig region{LrSchedule::step(1e-3, 0.1, 400, 500), 100.0, 0.9, 500};
};

/// One metrics row: step 0 carries the seeds, later steps carry the
/// "unary", "mined" and "pairwise" stages in that order.
struct StageRecord {
  int step = 0;
  std::string stage;
  Metrics metrics;
};

struct EmState {
  int step = 0;
  UnaryParams unary;
  PairwiseParams pairwise;
  RegionParams region;
  std::vector<LabelGrid> mined;    // Y_t
  std::vector<ProbGrid> alpha_u;   // unary output at step t
  std::vector<ProbGrid> alpha_p;   // G_t applied to alpha_u
  std::vector<StageRecord> records;
  /// Metrics of the unary network trained on the seeds during initialization.
  Metrics init_unary;
  /// Per step (index t-1): fraction of images where Y_t^T L_t a_t <= a_t^T L_t a_t.
  std::vector<double> inequality_fraction;
  /// Loss curves of the most recent trainings.
  std::vector<double> unary_loss;
  std::vector<double> pairwise_loss;
  std::vector<double> region_loss;
};

/// Per-image quantities that stay fixed for the whole run.
struct PreparedImage {
  PixelFeatures features;
  SuperpixelMap superpixels;
  RegionFeatureTable region_features;
};

class EmDriver {
 public:
  /// Throws Error when an image lacks seeds or the configuration is invalid.
  EmDriver(const Corpus& corpus, RunConfig config);

  /// Trains both networks on the seed maps Y_0.
  EmState initialize() const;

  /// One EM iteration t -> t+1: unary retraining on alpha_p_t, confident-region
  /// mining, pairwise retraining on Y_{t+1}, then propagation.
  EmState em_step(const EmState& state) const;

  /// initialize() followed by up to max_steps iterations. `on_record` sees
  /// every metrics row as soon as it is produced and `on_step` sees the state
  /// after each completed iteration.
  EmState run(const std::function<void(const StageRecord&)>& on_record = {},
              const std::function<void(const EmState&)>& on_step = {}) const;

  /// Applies trained networks to new images: unary prediction, then
  /// propagation unless the pairwise network is disabled.
  static ProbGrid infer(const UnaryParams& unary, const PairwiseParams* pairwise,
                        const RgbImage& image);

  const std::vector<PreparedImage>& prepared() const { return prepared_; }
  const RunConfig& config() const { return config_; }

 private:
  Metrics score(const std::vector<LabelGrid>& labels) const;
  double corpus_energy(const PairwiseParams& params, const std::vector<ProbGrid>& alpha) const;
  std::vector<ProbGrid> predict_all(const UnaryParams& params) const;
  std::vector<ProbGrid> propagate_all(const PairwiseParams& params,
                                      const std::vector<ProbGrid>& alpha_u) const;
  UnaryParams fit_unary(EmState& state, const UnaryParams& init,
                        const std::vector<LabelGrid>& labels) const;
  PairwiseParams fit_pairwise(EmState& state, const PairwiseParams& init,
                              const std::vector<ProbGrid>& alpha_u,
                              const std::vector<LabelGrid>& labels) const;
  std::vector<LabelGrid> mine(EmState& state, const std::vector<ProbGrid>& alpha_u) const;

  const Corpus& corpus_;
  RunConfig config_;
  std::vector<PreparedImage> prepared_;
};

/// One metric of one stage per step, in step order, read from the records.
std::vector<double> stage_series(const EmState& state, const std::string& stage,
                                 double Metrics::*field);

}  // namespace wsseg
