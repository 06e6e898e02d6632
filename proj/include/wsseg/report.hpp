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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wsseg/em.hpp"
#include "wsseg/miner.hpp"
#include "wsseg/propagation.hpp"
#include "wsseg/unary.hpp"

namespace wsseg {

inline constexpr const char* kMetricsHeader = "step,stage,mean_iou,precision,energy";

std::string metrics_row(const StageRecord& record);
/// Header plus one row per record.
std::string metrics_csv(const EmState& state);

/// Per-step mIoU deltas and energies; flags every step whose pairwise mIoU
/// falls below its unary mIoU.
std::string summary_text(const EmState& state);

using NamedValues = std::vector<std::pair<std::string, double>>;

// Flat `name,value` CSV; values printed with 17 significant digits so that a
// load restores the exact doubles.
void save_named_values(const std::filesystem::path& path, const NamedValues& values);
NamedValues load_named_values(const std::filesystem::path& path);

NamedValues to_named_values(const UnaryParams& params);
NamedValues to_named_values(const PairwiseParams& params);
NamedValues to_named_values(const RegionParams& params);
UnaryParams unary_from_named_values(const NamedValues& values);
PairwiseParams pairwise_from_named_values(const NamedValues& values);
RegionParams region_from_named_values(const NamedValues& values);

/// `region_id,pred_class,score`.
void save_region_scores(const std::filesystem::path& path, const RegionConfidence& confidence);

/// One P5 graymap per gate field, named <stem>_<dir>_g<k>.pgm, gate * 255.
std::vector<std::filesystem::path> save_affinity_maps(const std::filesystem::path& dir,
                                                      const std::string& stem,
                                                      const AffinityField& gates);

/// Writes unary.csv, pairwise.csv and region.csv for one EM step into `dir`.
void save_step_params(const std::filesystem::path& dir, const EmState& state);

/// Writes metrics.csv and summary.txt into `dir`.
void save_run_report(const std::filesystem::path& dir, const EmState& state);

}  // namespace wsseg
