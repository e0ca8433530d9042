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


// Exhaustive reference for the FairPick deletion solver on tiny instances.

#ifndef VDAUDIT_TESTS_FAIRPICK_ORACLE_HPP_
#define VDAUDIT_TESTS_FAIRPICK_ORACLE_HPP_

#include <cstddef>
#include <limits>
#include <vector>

#include "vdaudit/fairpick.hpp"

namespace vdaudit::testing {

struct OracleResult {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> deletions;
};

// Minimizes the linearized objective (pre-deletion anchors) over every
// integer deletion matrix 0 <= del <= counts that leaves each group at
// least one record.
inline OracleResult brute_force_deletions(const fairpick::ClusteredData& cd, double threshold) {
  const std::vector<double> anchors = fairpick::pre_deletion_anchors(cd);
  const std::size_t cells = cd.counts.size();
  std::vector<std::size_t> del(cells, 0);
  OracleResult best;
  while (true) {
    bool feasible = true;
    for (std::size_t i = 0; i < cd.groups && feasible; ++i) {
      std::size_t left = 0;
      for (std::size_t j = 0; j < cd.k; ++j) left += cd.count(i, j) - del[i * cd.k + j];
      feasible = left > 0;
    }
    if (feasible) {
      const double f = fairpick::linearized_objective(cd, threshold, del, anchors);
      if (f < best.objective) {
        best.objective = f;
        best.deletions = del;
      }
    }
    // Odometer increment over the grid.
    std::size_t c = 0;
    while (c < cells && del[c] == cd.counts[c]) del[c++] = 0;
    if (c == cells) break;
    ++del[c];
  }
  return best;
}

}  // namespace vdaudit::testing

#endif  // VDAUDIT_TESTS_FAIRPICK_ORACLE_HPP_
