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

// Group fairness of a membership inference attack: equal-opportunity
// disparity, vulnerability disparity (VD) and its per-probability-bin
// decomposition.

#ifndef VDAUDIT_METRICS_HPP_
#define VDAUDIT_METRICS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>

#include "json.hpp"
#include "vdaudit/dataset.hpp"

namespace vdaudit::metrics {

// One true member as seen by the attack.
struct VdRecord {
  int predicted = 0;  // attack output
  data::Group group = data::Group::kUnprotected;
  double probability = 0.0;  // target-model probability of the true class
};

// Pr(yhat = 1 | protected, y = 1) - Pr(yhat = 1 | unprotected, y = 1).
// Throws UndefinedMetric when a group has no positive-truth record.
double disparity_di(std::span<const int> predictions, std::span<const int> truths,
                    std::span<const data::Group> groups);

// Attack recall on protected members minus recall on unprotected members.
// Throws UndefinedMetric when a group has no members.
double vulnerability_disparity(std::span<const VdRecord> members);

// Relative change (after - before) / before; nullopt when before == 0.
std::optional<double> vd_change(double vd_before, double vd_after);

inline constexpr std::size_t kBins = 10;

// [0, 0.1), [0.1, 0.2), ..., [0.9, 1.0]; the last bin is closed.
std::size_t bin_index(double probability);

// Index 0 is the protected group, 1 the unprotected group.
inline std::size_t group_slot(data::Group g) { return g == data::Group::kProtected ? 0 : 1; }

struct VdReport {
  double vd = 0.0;
  std::optional<double> vd_dp;
  std::optional<double> change_c;
  // bin_recalls[r][g]: members of group g predicted 1 whose probability lies
  // in bin r, divided by the number of members of g.
  std::array<std::array<double, 2>, kBins> bin_recalls{};
  std::array<std::size_t, 2> group_members{};
  std::array<std::size_t, 2> group_positives{};
  std::array<bool, 2> no_positives{};

  nlohmann::json to_json() const;
  static VdReport from_json(const nlohmann::json& j);
  // Plot-ready rows: bin_lo,bin_hi,group,recall
  void write_bins_csv(std::ostream& out) const;
  bool operator==(const VdReport&) const = default;
};

// Fills vd and the bin table. Throws UndefinedMetric when a group has no
// members; a group with no positive predictions gets all-zero bins and its
// no_positives flag.
VdReport recall_by_bin(std::span<const VdRecord> members);

}  // namespace vdaudit::metrics

#endif  // VDAUDIT_METRICS_HPP_
