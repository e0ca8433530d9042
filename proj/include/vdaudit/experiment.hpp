// Copyright 2026 The vdaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The audit pipeline over a grid of privacy budgets and FairPick
// thresholds, repeated over seeded trials.
//
// A cell is one (epsilon or none, T or none) pair. Every trial runs all
// cells: split, optional FairPick per T, target training, attack and
// metrics. Seeds are derived from the master seed and the cell key, so
// editing the grid never changes the numbers of the cells that remain.

#ifndef VDAUDIT_EXPERIMENT_HPP_
#define VDAUDIT_EXPERIMENT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vdaudit/config.hpp"
#include "vdaudit/metrics.hpp"

namespace vdaudit::experiment {

// "eps-none_T-none", "eps-0.5_T-0.8"; safe to use in file names.
std::string cell_key(std::optional<double> epsilon, std::optional<double> threshold);

struct RunRecord {
  int trial = 0;
  std::uint64_t seed = 0;  // cell seed of this trial
  bool ok = false;
  std::string error;
  std::size_t train_size = 0;  // after FairPick
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::optional<double> precision;  // empty when no record was predicted a member
  double recall = 0.0;
  metrics::VdReport vd;
  // (|VD| of the same budget without FairPick - |VD|) / that |VD|, in %.
  std::optional<double> vd_reduction_pct;
  nlohmann::json fairpick = nullptr;  // per-class plans, null without FairPick

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
  bool operator==(const RunRecord&) const = default;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for fewer than 2 values
  std::size_t count = 0;

  bool operator==(const Summary&) const = default;
};

Summary summarize(const std::vector<double>& values);

struct Cell {
  std::string key;
  std::optional<double> epsilon;
  std::optional<double> threshold;
  std::vector<RunRecord> runs;  // one per trial, failed ones included
  std::size_t failed = 0;
  bool valid = true;  // at most 20% of the trials failed
  std::size_t no_positive_runs = 0;
  std::size_t baseline_zero_runs = 0;  // change c undefined
  std::map<std::string, Summary> metrics;
  std::array<std::array<double, 2>, metrics::kBins> mean_bin_recalls{};

  nlohmann::json to_json() const;
  static Cell from_json(const nlohmann::json& j);
  bool operator==(const Cell&) const = default;
};

struct Report {
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, Cell> cells;

  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);
  bool operator==(const Report&) const = default;
};

// Recomputes the summaries, failure counts and validity of `cell` from its runs.
void aggregate(Cell& cell);

Report run_experiment(const config::ExperimentConfig& cfg);

// Writes report.json, summary.csv, bins_<cell>.csv for every cell and
// plans_<cell>.json for every FairPick cell. Throws IoError.
void emit_report(const Report& report, const std::filesystem::path& dir);

}  // namespace vdaudit::experiment

#endif  // VDAUDIT_EXPERIMENT_HPP_
