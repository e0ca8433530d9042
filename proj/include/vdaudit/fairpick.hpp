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

// FairPick: shrinks the per-cluster distribution difference between
// protected groups by deleting training records.
//
// Within one class label, records are clustered on their non-protected
// features. With s(i, j) the number of group-i records in cluster j and S(i)
// the group total,
//
//   dvar(i, j) = s(i, j) / S(i) - sum_{l != i} s(l, j) / sum_{l != i} S(l).
//
// FairPick looks for deletion counts del(i, j) such that the post-deletion
// dvar equals T * dvar before deletion. The post-deletion dvar is a ratio in
// del; holding the denominators at the current group totals makes the target
// a linear system, which is solved in the least-squares sense under the box
// 0 <= del <= s by projected gradient descent. The real solution is rounded
// to integers, polished on the integer grid, and optionally re-anchored on
// the post-deletion totals for a few passes.

#ifndef VDAUDIT_FAIRPICK_HPP_
#define VDAUDIT_FAIRPICK_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "vdaudit/dataset.hpp"

namespace vdaudit::fairpick {

// Group row 0 is the protected group, row 1 the unprotected group; the
// solver itself accepts any number of groups.
struct ClusteredData {
  std::size_t groups = 2;
  std::size_t k = 0;
  std::vector<std::size_t> feature_columns;  // columns clustered on
  std::vector<double> centers;               // k x features, min-max scaled
  std::vector<int> assignment;               // cluster id per record
  std::vector<std::size_t> group_of;         // group row per record
  std::vector<std::size_t> counts;           // groups x k
  std::vector<std::size_t> group_totals;

  std::size_t count(std::size_t group, std::size_t cluster) const {
    return counts[group * k + cluster];
  }
};

// Builds a ClusteredData from explicit group rows and cluster ids, e.g. for
// a cell-count instance without a backing dataset.
ClusteredData from_counts(std::size_t groups, std::size_t k,
                          const std::vector<std::size_t>& counts);

struct DvarMatrix {
  std::size_t groups = 0;
  std::size_t k = 0;
  std::vector<double> values;  // groups x k

  double at(std::size_t group, std::size_t cluster) const { return values[group * k + cluster]; }
};

struct SolverOptions {
  // Re-solves with denominators taken from the post-deletion totals.
  int refine_passes = 5;
  int max_iterations = 100000;
  // Stop when L * ||x+ - x||^2 drops below this, with x+ the next projected
  // gradient iterate and L the gradient's Lipschitz constant.
  double stationarity = 1e-10;
  // Integer plans whose objective is within this much of the best one are
  // treated as ties and the one deleting the fewest records wins.
  double tie_tolerance = 5e-7;
};

struct DeletionPlan {
  std::size_t groups = 0;
  std::size_t k = 0;
  std::vector<std::size_t> deletions;  // groups x k
  std::vector<double> relaxed;         // real-valued box-constrained solution
  std::size_t ignored_negative_requests = 0;
  double residual = 0.0;  // objective of `deletions` under the final anchoring
  double threshold = 1.0;
  int iterations = 0;
  int passes = 0;

  std::size_t at(std::size_t group, std::size_t cluster) const {
    return deletions[group * k + cluster];
  }
  std::size_t total() const;
  nlohmann::json to_json() const;
  static DeletionPlan from_json(const nlohmann::json& j);
};

// Sum over cells of (dvar_post(del) - T * dvar_pre)^2 with the post-deletion
// dvar evaluated on fixed group denominators `anchors`.
double linearized_objective(const ClusteredData& cd, double threshold,
                            const std::vector<std::size_t>& deletions,
                            const std::vector<double>& anchors);

// Group totals as doubles, the default anchoring.
std::vector<double> pre_deletion_anchors(const ClusteredData& cd);

// Largest K whose seeded clustering puts more than `min_per_cluster`
// records of every group in every cluster, searching down from
//   min(|subset| / (min_per_cluster * n), min_g |G_g| / (min_per_cluster + 1)).
// Throws InvalidArgument when no K >= 1 qualifies.
std::size_t choose_k(const data::Dataset& subset, const data::GroupAssignment& groups,
                     std::size_t min_per_cluster, std::uint64_t seed);

// Clusters `subset` on min-max scaled features, excluding the class column
// and the protected attribute named in `groups`.
ClusteredData aggregate_features(const data::Dataset& subset,
                                 const data::GroupAssignment& groups, std::size_t k,
                                 std::uint64_t seed);

DvarMatrix compute_dvar(const ClusteredData& cd);

DeletionPlan solve_deletions(const ClusteredData& cd, double threshold,
                             const SolverOptions& options = {});

// Deletes del(i, j) uniformly chosen records from every (group, cluster)
// cell; survivors keep their original values and order.
data::Dataset apply_plan(const data::Dataset& subset, const ClusteredData& cd,
                         const DeletionPlan& plan, std::uint64_t seed);

struct ClassOutcome {
  int label = 0;
  std::size_t k = 0;
  DvarMatrix dvar_before;
  DeletionPlan plan;
};

struct FairPickResult {
  data::Dataset data;
  std::vector<ClassOutcome> classes;

  nlohmann::json diagnostics() const;
};

// Runs the pipeline independently for every class label and returns the
// surviving records in their original order.
FairPickResult fairpick(const data::Dataset& train, const data::GroupAssignment& groups,
                        double threshold, std::size_t min_per_cluster, std::uint64_t seed,
                        const SolverOptions& options = {});

}  // namespace vdaudit::fairpick

#endif  // VDAUDIT_FAIRPICK_HPP_
