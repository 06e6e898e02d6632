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

#include "wsseg/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wsseg/error.hpp"
#include "wsseg/pnm.hpp"

namespace wsseg {
namespace {

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double lookup(const std::map<std::string, double>& m, const std::string& name) {
  const auto it = m.find(name);
  if (it == m.end()) throw Error("parameter file lacks '" + name + "'");
  return it->second;
}

std::map<std::string, double> as_map(const NamedValues& values) {
  return {values.begin(), values.end()};
}

void append_scaling(NamedValues& out, const char* prefix, const InputScaling& scaling) {
  for (std::size_t k = 0; k < scaling.mean.size(); ++k) {
    out.emplace_back(format("%s_mean_%02zu", prefix, k), scaling.mean[k]);
    out.emplace_back(format("%s_scale_%02zu", prefix, k), scaling.scale[k]);
  }
}

// Absent entries mean the identity scaling.
InputScaling read_scaling(const std::map<std::string, double>& m, const char* prefix, int dim) {
  InputScaling out;
  if (!m.contains(format("%s_mean_00", prefix))) return out;
  for (int k = 0; k < dim; ++k) {
    out.mean.push_back(lookup(m, format("%s_mean_%02d", prefix, k)));
    out.scale.push_back(lookup(m, format("%s_scale_%02d", prefix, k)));
  }
  return out;
}

}  // namespace

std::string metrics_row(const StageRecord& r) {
  return format("%d,%s,%.6f,%.6f,%.9f", r.step, r.stage.c_str(), r.metrics.mean_iou,
                r.metrics.precision, r.metrics.energy);
}

std::string metrics_csv(const EmState& state) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : state.records) out += metrics_row(r) + "\n";
  return out;
}

std::string summary_text(const EmState& state) {
  std::ostringstream out;
  out << format("init unary: mIoU %.2f  precision %.2f\n", 100 * state.init_unary.mean_iou,
                100 * state.init_unary.precision);
  std::map<int, std::map<std::string, Metrics>> by_step;
  for (const auto& r : state.records) by_step[r.step][r.stage] = r.metrics;
  double previous = -1.0;
  for (const auto& [step, stages] : by_step) {
    if (step == 0) {
      const auto& s = stages.at("seeds");
      out << format("step 0  seeds     mIoU %6.2f  precision %6.2f\n", 100 * s.mean_iou,
                    100 * s.precision);
      continue;
    }
    if (!stages.contains("pairwise")) continue;
    const auto& u = stages.at("unary");
    const auto& m = stages.at("mined");
    const auto& p = stages.at("pairwise");
    out << format("step %d  unary %6.2f  mined %6.2f (prec %6.2f)  pairwise %6.2f", step,
                  100 * u.mean_iou, 100 * m.mean_iou, 100 * m.precision, 100 * p.mean_iou);
    if (previous >= 0) out << format("  delta %+6.2f", 100 * (p.mean_iou - previous));
    out << format("  energy %.6f", p.energy);
    if (p.mean_iou < u.mean_iou) out << "  [pairwise below unary]";
    out << "\n";
    previous = p.mean_iou;
  }
  return out.str();
}

void save_named_values(const std::filesystem::path& path, const NamedValues& values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "name,value\n";
  for (const auto& [name, v] : values) out << name << ',' << format("%.17g", v) << '\n';
}

NamedValues load_named_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  NamedValues out;
  std::string line;
  std::getline(in, line);
  if (line != "name,value") throw Error(path.string() + ": missing name,value header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(path.string() + ": malformed row");
    out.emplace_back(line.substr(0, comma), std::stod(line.substr(comma + 1)));
  }
  return out;
}

NamedValues to_named_values(const UnaryParams& p) {
  NamedValues out;
  out.emplace_back("num_classes", p.num_classes);
  for (int c = 0; c < p.num_classes; ++c) {
    for (int d = 0; d <= kFeatureDim; ++d) {
      const std::string name = d == kFeatureDim ? format("unary_c%d_bias", c)
                                                : format("unary_c%d_w%d", c, d);
      out.emplace_back(name, p.values[static_cast<std::size_t>(c * (kFeatureDim + 1) + d)]);
    }
  }
  append_scaling(out, "unary_input", p.scaling);
  return out;
}

UnaryParams unary_from_named_values(const NamedValues& values) {
  const auto m = as_map(values);
  UnaryParams p = UnaryParams::zeros(static_cast<int>(lookup(m, "num_classes")));
  for (int c = 0; c < p.num_classes; ++c) {
    for (int d = 0; d <= kFeatureDim; ++d) {
      const std::string name = d == kFeatureDim ? format("unary_c%d_bias", c)
                                                : format("unary_c%d_w%d", c, d);
      p.values[static_cast<std::size_t>(c * (kFeatureDim + 1) + d)] = lookup(m, name);
    }
  }
  p.scaling = read_scaling(m, "unary_input", kFeatureDim);
  return p;
}

NamedValues to_named_values(const PairwiseParams& p) {
  NamedValues out;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    out.emplace_back(PairwiseParams::value_name(i), p.values[i]);
  }
  append_scaling(out, "gate_input", p.scaling);
  return out;
}

PairwiseParams pairwise_from_named_values(const NamedValues& values) {
  const auto m = as_map(values);
  PairwiseParams p = PairwiseParams::zeros();
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    p.values[i] = lookup(m, PairwiseParams::value_name(i));
  }
  p.scaling = read_scaling(m, "gate_input", kGateInputDim);
  return p;
}

NamedValues to_named_values(const RegionParams& p) {
  NamedValues out;
  out.emplace_back("num_classes", p.num_classes);
  for (int d = 0; d < kRegionFeatureDim; ++d) {
    out.emplace_back(format("region_mean_f%d", d), p.feature_mean[static_cast<std::size_t>(d)]);
    out.emplace_back(format("region_scale_f%d", d), p.feature_scale[static_cast<std::size_t>(d)]);
  }
  for (int c = 0; c < p.num_classes; ++c) {
    for (int d = 0; d <= kRegionFeatureDim; ++d) {
      const std::string name = d == kRegionFeatureDim ? format("region_c%d_bias", c)
                                                      : format("region_c%d_w%d", c, d);
      out.emplace_back(name, p.values[static_cast<std::size_t>(c * (kRegionFeatureDim + 1) + d)]);
    }
  }
  return out;
}

RegionParams region_from_named_values(const NamedValues& values) {
  const auto m = as_map(values);
  RegionParams p = RegionParams::zeros(static_cast<int>(lookup(m, "num_classes")));
  for (int d = 0; d < kRegionFeatureDim; ++d) {
    p.feature_mean[static_cast<std::size_t>(d)] = lookup(m, format("region_mean_f%d", d));
    p.feature_scale[static_cast<std::size_t>(d)] = lookup(m, format("region_scale_f%d", d));
  }
  for (int c = 0; c < p.num_classes; ++c) {
    for (int d = 0; d <= kRegionFeatureDim; ++d) {
      const std::string name = d == kRegionFeatureDim ? format("region_c%d_bias", c)
                                                      : format("region_c%d_w%d", c, d);
      p.values[static_cast<std::size_t>(c * (kRegionFeatureDim + 1) + d)] = lookup(m, name);
    }
  }
  return p;
}

void save_region_scores(const std::filesystem::path& path, const RegionConfidence& conf) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "region_id,pred_class,score\n";
  for (std::size_t r = 0; r < conf.predicted.size(); ++r) {
    out << r << ',' << static_cast<int>(conf.predicted[r]) << ','
        << format("%.6f", conf.max_score[r]) << '\n';
  }
}

std::vector<std::filesystem::path> save_affinity_maps(const std::filesystem::path& dir,
                                                      const std::string& stem,
                                                      const AffinityField& gates) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (int f = 0; f < kGateFields; ++f) {
    const auto d = static_cast<ScanDirection>(f / kGateGroups);
    pnm::Graymap map{gates.width, gates.height, {}};
    map.pixels.reserve(gates.pixel_count());
    for (double g : gates.gates[static_cast<std::size_t>(f)]) {
      map.pixels.push_back(static_cast<std::uint8_t>(std::lround(g * 255.0)));
    }
    auto path = dir / format("%s_%s_g%d.pgm", stem.c_str(), direction_name(d), f % kGateGroups);
    pnm::save_pgm(path, map);
    written.push_back(std::move(path));
  }
  return written;
}

void save_step_params(const std::filesystem::path& dir, const EmState& state) {
  std::filesystem::create_directories(dir);
  save_named_values(dir / "unary.csv", to_named_values(state.unary));
  save_named_values(dir / "pairwise.csv", to_named_values(state.pairwise));
  save_named_values(dir / "region.csv", to_named_values(state.region));
}

void save_run_report(const std::filesystem::path& dir, const EmState& state) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "metrics.csv");
  std::ofstream summary(dir / "summary.txt");
  if (!csv || !summary) throw Error("cannot write report into " + dir.string());
  csv << metrics_csv(state);
  summary << summary_text(state);
}

}  // namespace wsseg
