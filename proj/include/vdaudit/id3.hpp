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

// ID3 decision trees over the discrete attribute codes of a Dataset, with an
// optional SuLQ-style differentially private builder that perturbs the
// counts used for split scoring and for leaf voting with Laplace noise.

#ifndef VDAUDIT_ID3_HPP_
#define VDAUDIT_ID3_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "vdaudit/dataset.hpp"

namespace vdaudit::id3 {

// Inverse-CDF Laplace draw centred at 0:
//   -scale * sign(u - 0.5) * ln(1 - 2|u - 0.5|)
// `u` must lie in the open interval (0, 1); callers resample endpoints.
double sample_laplace(double scale, double u);

struct DpConfig {
  double epsilon = 1.0;
  // Test hook: false builds with exact counts through the private code path.
  bool noise_enabled = true;
};

// Floor applied to noisy counts inside the logarithm of the split score.
inline constexpr double kLogFloor = 1e-9;

// Score of one candidate split,
//   V = sum_j sum_c N_jc * log(N_jc / N_j),
// which equals -|T| * H(C | A) for exact counts. `class_counts` is row-major
// [branch][class]. Non-positive counts are floored at kLogFloor inside the
// log only.
double split_score(std::span<const double> branch_counts,
                   std::span<const double> class_counts, int class_count);

// A node is a leaf when `attribute < 0`. Children of an internal node are
// stored contiguously, one per value of the split attribute, starting at
// `first_child`. Every node carries a class distribution: the leaf vote for
// leaves, and for internal nodes the fallback used when a record carries a
// value the split has no branch for.
struct Node {
  int attribute = -1;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;

  bool is_leaf() const { return attribute < 0; }
  bool operator==(const Node&) const = default;
};

class DecisionTree {
 public:
  DecisionTree(int class_count, int depth_limit, std::vector<Node> nodes,
               std::vector<double> probabilities);

  int class_count() const { return class_count_; }
  int depth_limit() const { return depth_limit_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::span<const double> distribution(std::size_t node) const {
    return {probabilities_.data() + node * static_cast<std::size_t>(class_count_),
            static_cast<std::size_t>(class_count_)};
  }

  // Class distribution for a record given by its attribute codes.
  std::span<const double> predict_proba(std::span<const int> codes) const;
  std::span<const double> predict_proba(const data::Dataset& ds,
                                        std::size_t row) const {
    return predict_proba(ds.codes(row));
  }

  // Longest root-to-leaf path, counted in internal nodes.
  int depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& doc);

  bool operator==(const DecisionTree&) const = default;

 private:
  int class_count_ = 0;
  int depth_limit_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> probabilities_;
};

// ID3 with exact counts. Splits on argmax V (ties to the lowest column
// index); stops at depth 0, when attributes run out, or when the node is
// pure. Empty nodes inherit the parent's class distribution.
DecisionTree train_id3(const data::Dataset& train, int depth);

// DP-ID3. Leaves draw N_c = |T_c| + Lap(1/eps) until N_c >= 0; internal
// nodes score splits on N_j = |T_j| + Lap(2m/eps) and
// N_jc = |T_jc| + Lap(2m/eps), m = number of candidate attributes at the
// node. Every recursive call receives the same eps. Same stopping rules and
// tie-breaking as train_id3.
DecisionTree train_dp_id3(const data::Dataset& train, int depth,
                          const DpConfig& dp, std::uint64_t seed);

// Argmax-class match rate; ties go to the lowest class index.
double accuracy(const DecisionTree& tree, const data::Dataset& ds);

int argmax(std::span<const double> v);

}  // namespace vdaudit::id3

#endif  // VDAUDIT_ID3_HPP_
