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


#include "vdaudit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "vdaudit/error.hpp"
#include "vdaudit/serialize.hpp"

namespace vdaudit::experiment {
namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vdaudit_experiment_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(CellKey, Format) {
  EXPECT_EQ(cell_key(std::nullopt, std::nullopt), "eps-none_T-none");
  EXPECT_EQ(cell_key(0.5, 0.8), "eps-0.5_T-0.8");
  EXPECT_EQ(cell_key(100.0, std::nullopt), "eps-100_T-none");
  EXPECT_EQ(cell_key(0.01, 0.4), "eps-0.01_T-0.4");
}

TEST(Summarize, MeanAndSampleStd) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(summarize({7.0}).stddev, 0.0);
  EXPECT_EQ(summarize({}).count, 0u);
}

TEST(Aggregate, FailuresAndValidity) {
  Cell cell;
  for (int t = 0; t < 5; ++t) {
    RunRecord r;
    r.trial = t;
    r.ok = t != 0;
    r.error = r.ok ? "" : "boom";
    r.precision = 0.5 + 0.1 * t;
    r.recall = 0.5;
    cell.runs.push_back(r);
  }
  aggregate(cell);
  EXPECT_EQ(cell.failed, 1u);
  EXPECT_TRUE(cell.valid);  // 1 of 5 is exactly 20%
  EXPECT_EQ(cell.metrics.at("precision").count, 4u);
  cell.runs[1].ok = false;
  aggregate(cell);
  EXPECT_FALSE(cell.valid);
}

TEST(Report, JsonRoundTrip) {
  Report report;
  report.config = {{"seed", 1}};
  Cell cell;
  cell.key = cell_key(1.0, std::nullopt);
  cell.epsilon = 1.0;
  RunRecord r;
  r.ok = true;
  r.precision = 0.6;
  r.recall = 0.7;
  r.vd.vd = 0.1;
  r.vd.vd_dp = 0.1;
  r.vd_reduction_pct = 12.5;
  cell.runs.push_back(r);
  aggregate(cell);
  report.cells.emplace(cell.key, cell);
  const Report back = Report::from_json(report.to_json());
  EXPECT_EQ(back, report);
}

TEST(EmitReport, EmptyReport) {
  const auto dir = scratch("empty");
  std::filesystem::remove_all(dir);
  emit_report(Report{}, dir);
  const nlohmann::json doc = read_json(dir / "report.json");
  EXPECT_TRUE(unwrap(doc, "experiment_report").at("cells").empty());
  const std::string csv = slurp(dir / "summary.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(csv.rfind("cell,epsilon,threshold,runs,failed,valid,no_positive_runs,", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(EmitReport, OneCellSummary) {
  const auto dir = scratch("one");
  std::filesystem::remove_all(dir);
  Report report;
  Cell cell;
  cell.key = cell_key(std::nullopt, std::nullopt);
  RunRecord r;
  r.ok = true;
  r.train_accuracy = 0.9;
  r.precision = 0.5;
  r.recall = 0.25;
  cell.runs.push_back(r);
  aggregate(cell);
  report.cells.emplace(cell.key, cell);
  emit_report(report, dir);
  const std::string csv = slurp(dir / "summary.csv");
  const std::string row = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(row.rfind("eps-none_T-none,none,none,1,0,true,0,0.9,0,", 0), 0u) << row;
  EXPECT_TRUE(std::filesystem::exists(dir / "bins_eps-none_T-none.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "plans_eps-none_T-none.json"));
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, GridShapeAndBaselines) {
  const auto dir = scratch("grid");
  config::ExperimentConfig cfg = testing::toy_experiment(dir, 1200, 1);
  cfg.epsilons = {0.1, 10.0};
  cfg.fairpick = true;
  cfg.thresholds = {0.8};
  cfg.trials = 2;
  const Report report = run_experiment(cfg);
  ASSERT_EQ(report.cells.size(), 6u);
  for (const auto& [key, cell] : report.cells) {
    ASSERT_EQ(cell.runs.size(), 2u) << key;
    for (const RunRecord& r : cell.runs) {
      ASSERT_TRUE(r.ok) << key << ": " << r.error;
      EXPECT_EQ(r.vd.vd_dp.has_value(), cell.epsilon.has_value());
      if (!cell.threshold) EXPECT_FALSE(r.vd_reduction_pct.has_value());
      EXPECT_EQ(r.fairpick.is_null(), !cell.threshold.has_value());
    }
  }
  const Cell& base = report.cells.at("eps-none_T-none");
  const Cell& fair = report.cells.at("eps-none_T-0.8");
  EXPECT_LE(fair.runs[0].train_size, base.runs[0].train_size);
  emit_report(report, dir / "out");
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "plans_eps-0.1_T-0.8.json"));
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, DeterministicAcrossRunsAndThreadCounts) {
  const auto dir = scratch("determinism");
  config::ExperimentConfig cfg = testing::toy_experiment(dir, 600, 2);
  const Report a = run_experiment(cfg);
  cfg.jobs = 3;
  const Report b = run_experiment(cfg);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, RemovingACellLeavesTheOthersUnchanged) {
  const auto dir = scratch("stable");
  config::ExperimentConfig cfg = testing::toy_experiment(dir, 600, 3);
  cfg.epsilons = {0.5, 5.0};
  const Report full = run_experiment(cfg);
  cfg.epsilons = {5.0};
  const Report part = run_experiment(cfg);
  EXPECT_EQ(full.cells.at("eps-5_T-none").to_json(), part.cells.at("eps-5_T-none").to_json());
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, BadProtectedAttributeFailsEarly) {
  const auto dir = scratch("badattr");
  config::ExperimentConfig cfg = testing::toy_experiment(dir, 100, 4);
  cfg.protected_attribute = "a0";
  EXPECT_THROW(run_experiment(cfg), InvalidArgument);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace vdaudit::experiment
