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


#include "vdaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "vdaudit/error.hpp"
#include "vdaudit/random.hpp"

namespace vdaudit::metrics {
namespace {

using data::Group;

constexpr Group kP = Group::kProtected;
constexpr Group kU = Group::kUnprotected;

TEST(DisparityDi, WorkedExample) {
  // Protected positives: 2 of 3 predicted 1. Unprotected positives: 1 of 2.
  const std::vector<int> pred{1, 1, 0, 1, 0, 1};
  const std::vector<int> truth{1, 1, 1, 1, 1, 0};
  const std::vector<Group> group{kP, kP, kP, kU, kU, kU};
  EXPECT_NEAR(disparity_di(pred, truth, group), 2.0 / 3 - 0.5, 1e-15);
}

TEST(DisparityDi, UndefinedWithoutPositives) {
  const std::vector<int> pred{1, 0};
  const std::vector<int> truth{0, 1};
  const std::vector<Group> group{kP, kU};
  EXPECT_THROW(disparity_di(pred, truth, group), UndefinedMetric);
  const std::vector<int> short_truth{1};
  EXPECT_THROW(disparity_di(pred, short_truth, group), InvalidArgument);
}

TEST(VulnerabilityDisparity, WorkedExample) {
  const std::vector<VdRecord> members{
      {1, kP, 0.9}, {1, kP, 0.8}, {0, kP, 0.4}, {1, kU, 0.95}, {0, kU, 0.5},
  };
  EXPECT_NEAR(vulnerability_disparity(members), 2.0 / 3 - 0.5, 1e-15);
}

TEST(VulnerabilityDisparity, UndefinedForAnEmptyGroup) {
  const std::vector<VdRecord> members{{1, kP, 0.9}};
  EXPECT_THROW(vulnerability_disparity(members), UndefinedMetric);
  EXPECT_THROW(recall_by_bin(members), UndefinedMetric);
}

TEST(VdChange, RelativeShift) {
  EXPECT_DOUBLE_EQ(*vd_change(0.1, 0.05), -0.5);
  EXPECT_DOUBLE_EQ(*vd_change(-0.2, -0.3), 0.5);
  EXPECT_FALSE(vd_change(0.0, 0.1).has_value());
}

TEST(BinIndex, Edges) {
  EXPECT_EQ(bin_index(0.0), 0u);
  EXPECT_EQ(bin_index(0.0999), 0u);
  EXPECT_EQ(bin_index(0.1), 1u);
  EXPECT_EQ(bin_index(0.95), 9u);
  EXPECT_EQ(bin_index(1.0), 9u);  // last bin is closed
  EXPECT_THROW(bin_index(-0.01), InvalidArgument);
  EXPECT_THROW(bin_index(1.01), InvalidArgument);
}

TEST(RecallByBin, WorkedExample) {
  const std::vector<VdRecord> members{
      {1, kP, 0.95}, {1, kP, 0.15}, {0, kP, 0.95}, {0, kP, 0.5}, {1, kU, 1.0}, {0, kU, 0.2},
  };
  const VdReport rep = recall_by_bin(members);
  EXPECT_DOUBLE_EQ(rep.bin_recalls[9][0], 0.25);
  EXPECT_DOUBLE_EQ(rep.bin_recalls[1][0], 0.25);
  EXPECT_DOUBLE_EQ(rep.bin_recalls[9][1], 0.5);
  EXPECT_EQ(rep.group_members[0], 4u);
  EXPECT_EQ(rep.group_positives[1], 1u);
  EXPECT_DOUBLE_EQ(rep.vd, 0.0);
}

TEST(RecallByBin, GroupWithoutPositivesIsFlagged) {
  const std::vector<VdRecord> members{{0, kP, 0.9}, {1, kU, 0.9}};
  const VdReport rep = recall_by_bin(members);
  EXPECT_TRUE(rep.no_positives[0]);
  EXPECT_FALSE(rep.no_positives[1]);
  for (const auto& bin : rep.bin_recalls) EXPECT_EQ(bin[0], 0.0);
  EXPECT_DOUBLE_EQ(rep.vd, -1.0);
}

// The per-bin recall differences add up to VD for any input.
TEST(RecallByBin, BinDifferencesSumToVd) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<VdRecord> members;
    const std::size_t n = 2 + rng.below(300);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = rng.uniform() < 0.05 ? 1.0 : rng.uniform();
      members.push_back({static_cast<int>(rng.below(2)), i % 2 ? kP : kU, p});
    }
    const VdReport rep = recall_by_bin(members);
    double sum = 0.0;
    for (const auto& bin : rep.bin_recalls) sum += bin[0] - bin[1];
    ASSERT_NEAR(sum, rep.vd, 1e-12) << "trial " << trial;
    ASSERT_NEAR(rep.vd, vulnerability_disparity(members), 1e-12);
  }
}

TEST(VdReport, JsonRoundTripAndCsv) {
  const std::vector<VdRecord> members{{1, kP, 0.95}, {0, kP, 0.3}, {1, kU, 0.05}};
  VdReport rep = recall_by_bin(members);
  rep.vd_dp = 0.1;
  rep.change_c = -0.2;
  EXPECT_EQ(VdReport::from_json(rep.to_json()), rep);
  std::ostringstream out;
  rep.write_bins_csv(out);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_lo,bin_hi,group,recall");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
}

}  // namespace
}  // namespace vdaudit::metrics
