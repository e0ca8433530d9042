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


#include "vdaudit/fairpick.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "fairpick_oracle.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"
#include "vdaudit/error.hpp"

namespace vdaudit::fairpick {
namespace {

// One categorical feature "a0" with values v0/v1 and a single class.
// Protected records fall on v0 with probability `p_protected`, unprotected
// ones with probability `p_unprotected`.
data::Dataset two_cluster_dataset(std::size_t per_group, double p_protected,
                                  double p_unprotected) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t g = 0; g < 2; ++g) {
    const double p = g == 0 ? p_protected : p_unprotected;
    const auto on_v0 = static_cast<std::size_t>(std::llround(p * static_cast<double>(per_group)));
    for (std::size_t r = 0; r < per_group; ++r) {
      rows.push_back({r < on_v0 ? "v0" : "v1", g == 0 ? "F" : "M", "c0"});
    }
  }
  return data::Dataset::from_rows(testing::toy_schema(1), rows);
}

TEST(Dvar, WorkedExample) {
  // Protected: 30 and 10; unprotected: 20 and 40.
  const ClusteredData cd = from_counts(2, 2, {30, 10, 20, 40});
  const DvarMatrix d = compute_dvar(cd);
  EXPECT_NEAR(d.at(0, 0), 30.0 / 40 - 20.0 / 60, 1e-15);
  EXPECT_NEAR(d.at(1, 0), 20.0 / 60 - 30.0 / 40, 1e-15);
  EXPECT_NEAR(d.at(0, 1), 10.0 / 40 - 40.0 / 60, 1e-15);
}

TEST(Dvar, RowsSumToZero) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(3), k = 1 + rng.below(6);
    std::vector<std::size_t> counts(n * k);
    for (auto& c : counts) c = 1 + rng.below(50);
    const DvarMatrix d = compute_dvar(from_counts(n, k, counts));
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < k; ++j) row += d.at(i, j);
      ASSERT_NEAR(row, 0.0, 1e-12);
    }
  }
}

TEST(SolveDeletions, ThresholdOneDeletesNothing) {
  const ClusteredData cd = from_counts(2, 3, {30, 10, 5, 20, 40, 7});
  const DeletionPlan plan = solve_deletions(cd, 1.0);
  EXPECT_EQ(plan.total(), 0u);
  EXPECT_NEAR(plan.residual, 0.0, 1e-15);
}

TEST(SolveDeletions, BalancedDataDeletesNothing) {
  const ClusteredData cd = from_counts(2, 2, {10, 20, 30, 60});
  const DeletionPlan plan = solve_deletions(cd, 0.5);
  EXPECT_EQ(plan.total(), 0u);
}

TEST(SolveDeletions, MatchesBruteForceOnTwoByTwo) {
  Rng rng(2);
  SolverOptions options;
  options.refine_passes = 0;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::size_t> counts(4);
    for (auto& c : counts) c = 1 + rng.below(20);
    const double threshold = 0.2 * static_cast<double>(rng.below(5));
    const ClusteredData cd = from_counts(2, 2, counts);
    const DeletionPlan plan = solve_deletions(cd, threshold, options);
    const testing::OracleResult oracle = testing::brute_force_deletions(cd, threshold);
    const double f = linearized_objective(cd, threshold, plan.deletions, pre_deletion_anchors(cd));
    EXPECT_NEAR(f, plan.residual, 1e-12);
    EXPECT_LE(f, oracle.objective + 1e-6) << "trial " << trial;
  }
}

TEST(SolveDeletions, ThreeGroupsStayNearBruteForce) {
  Rng rng(3);
  SolverOptions options;
  options.refine_passes = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> counts(6);
    for (auto& c : counts) c = 1 + rng.below(6);
    const ClusteredData cd = from_counts(3, 2, counts);
    const DeletionPlan plan = solve_deletions(cd, 0.5, options);
    const testing::OracleResult oracle = testing::brute_force_deletions(cd, 0.5);
    // Local search is not exact for more than two groups; it must still
    // improve on deleting nothing and land close to the optimum.
    const std::vector<std::size_t> none(6, 0);
    const auto anchors = pre_deletion_anchors(cd);
    EXPECT_LE(plan.residual, linearized_objective(cd, 0.5, none, anchors) + 1e-12);
    EXPECT_LE(plan.residual, oracle.objective + 0.05) << "trial " << trial;
  }
}

TEST(SolveDeletions, PlansRespectTheBoxAndKeepEveryGroup) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(2), k = 1 + rng.below(5);
    std::vector<std::size_t> counts(n * k);
    for (auto& c : counts) c = rng.below(30);
    for (std::size_t i = 0; i < n; ++i) counts[i * k] += 1;  // no empty group
    const ClusteredData cd = from_counts(n, k, counts);
    const DeletionPlan plan = solve_deletions(cd, rng.uniform());
    for (std::size_t c = 0; c < counts.size(); ++c) ASSERT_LE(plan.deletions[c], counts[c]);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t left = 0;
      for (std::size_t j = 0; j < k; ++j) left += counts[i * k + j] - plan.at(i, j);
      ASSERT_GT(left, 0u) << "trial " << trial;
    }
    ASSERT_EQ(plan.relaxed.size(), counts.size());
  }
}

TEST(SolveDeletions, RefinementNeverWorsensTheTrueObjective) {
  const ClusteredData cd = from_counts(2, 3, {300, 100, 50, 100, 300, 60});
  SolverOptions single;
  single.refine_passes = 0;
  const DeletionPlan once = solve_deletions(cd, 0.4, single);
  const DeletionPlan refined = solve_deletions(cd, 0.4);
  const auto true_objective = [&](const DeletionPlan& p) {
    std::vector<double> anchors(2, 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        anchors[i] += static_cast<double>(cd.count(i, j) - p.at(i, j));
      }
    }
    return linearized_objective(cd, 0.4, p.deletions, anchors);
  };
  EXPECT_LE(true_objective(refined), true_objective(once) + 1e-12);
  EXPECT_GE(refined.passes, 1);
}

TEST(SolveDeletions, RejectsThresholdOutsideUnitInterval) {
  const ClusteredData cd = from_counts(2, 1, {3, 4});
  EXPECT_THROW(solve_deletions(cd, 1.5), InvalidArgument);
  EXPECT_THROW(solve_deletions(cd, -0.1), InvalidArgument);
}

TEST(DeletionPlan, JsonRoundTrip) {
  const ClusteredData cd = from_counts(2, 2, {30, 10, 20, 40});
  const DeletionPlan plan = solve_deletions(cd, 0.6);
  const DeletionPlan back = DeletionPlan::from_json(plan.to_json());
  EXPECT_EQ(back.deletions, plan.deletions);
  EXPECT_EQ(back.ignored_negative_requests, plan.ignored_negative_requests);
  EXPECT_DOUBLE_EQ(back.residual, plan.residual);
  EXPECT_EQ(back.to_json(), plan.to_json());
}

TEST(ApplyPlan, DeletesExactlyThePlannedCounts) {
  const data::Dataset ds = two_cluster_dataset(100, 0.7, 0.3);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  const ClusteredData cd = aggregate_features(ds, groups, 2, 1);
  DeletionPlan plan = solve_deletions(cd, 0.5);
  ASSERT_GT(plan.total(), 0u);
  const data::Dataset out = apply_plan(ds, cd, plan, 9);
  EXPECT_EQ(out.size(), ds.size() - plan.total());
  EXPECT_TRUE(std::is_sorted(out.ids().begin(), out.ids().end()));
  EXPECT_EQ(apply_plan(ds, cd, plan, 9).ids().size(), out.size());
  const data::Dataset again = apply_plan(ds, cd, plan, 9);
  EXPECT_TRUE(std::equal(again.ids().begin(), again.ids().end(), out.ids().begin()));
  plan.deletions[0] = 1000;
  EXPECT_THROW(apply_plan(ds, cd, plan, 9), InvalidArgument);
}

TEST(AggregateFeatures, SkipsClassAndProtectedColumns) {
  const data::Dataset ds = two_cluster_dataset(50, 0.6, 0.4);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  const ClusteredData cd = aggregate_features(ds, groups, 2, 3);
  EXPECT_EQ(cd.feature_columns, (std::vector<std::size_t>{0}));
  EXPECT_EQ(cd.group_totals, (std::vector<std::size_t>{50, 50}));
  EXPECT_EQ(cd.count(0, 0) + cd.count(0, 1), 50u);
}

TEST(ChooseK, EveryCellHasMoreThanTheMinimum) {
  Rng rng(5);
  const data::Dataset ds = testing::random_dataset(rng, 600, 3, 4, 1);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  const std::size_t k = choose_k(ds, groups, 10, 7);
  ASSERT_GE(k, 1u);
  const ClusteredData cd = aggregate_features(ds, groups, k, derive_seed(7, "kmeans", k));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < k; ++j) EXPECT_GT(cd.count(i, j), 10u);
  }
}

TEST(ChooseK, TooFewRecordsThrows) {
  const data::Dataset ds = two_cluster_dataset(5, 0.5, 0.5);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  EXPECT_THROW(choose_k(ds, groups, 10, 1), InvalidArgument);
}

TEST(FairPick, ThresholdOneReturnsTheInputUnchanged) {
  Rng rng(6);
  const data::Dataset ds = testing::random_dataset(rng, 800, 3, 3, 2);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  const FairPickResult r = fairpick(ds, groups, 1.0, 10, 4);
  ASSERT_EQ(r.data.size(), ds.size());
  for (std::size_t row = 0; row < ds.size(); ++row) {
    ASSERT_EQ(r.data.id(row), ds.id(row));
    for (std::size_t c = 0; c < ds.width(); ++c) ASSERT_EQ(r.data.raw(row, c), ds.raw(row, c));
  }
}

TEST(FairPick, ShrinksAnEngineeredDisparity) {
  const data::Dataset ds = two_cluster_dataset(500, 0.7, 0.3);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  for (double t : {0.4, 0.6, 0.8}) {
    const FairPickResult r = fairpick(ds, groups, t, 10, 1);
    ASSERT_EQ(r.classes.size(), 1u);
    EXPECT_EQ(r.classes[0].k, 2u);
    const data::GroupAssignment after = data::binarize_group(r.data, "group");
    double on_v0[2] = {0, 0}, total[2] = {0, 0};
    for (std::size_t row = 0; row < r.data.size(); ++row) {
      const std::size_t g = after.labels[row] == data::Group::kProtected ? 0 : 1;
      total[g] += 1;
      on_v0[g] += r.data.raw(row, 0) == "v0" ? 1 : 0;
    }
    EXPECT_NEAR(on_v0[0] / total[0] - on_v0[1] / total[1], 0.4 * t, 0.05) << "T " << t;
  }
}

TEST(FairPick, DiagnosticsListEveryClass) {
  Rng rng(7);
  const data::Dataset ds = testing::random_dataset(rng, 900, 3, 3, 2);
  const data::GroupAssignment groups = data::binarize_group(ds, "group");
  const FairPickResult r = fairpick(ds, groups, 0.6, 10, 2);
  EXPECT_EQ(r.classes.size(), 2u);
  const nlohmann::json d = r.diagnostics();
  EXPECT_EQ(d.size(), 2u);
  EXPECT_LE(r.data.size(), ds.size());
}

}  // namespace
}  // namespace vdaudit::fairpick
