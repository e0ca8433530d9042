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


#include "vdaudit/kmeans.hpp"

#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "vdaudit/error.hpp"
#include "vdaudit/random.hpp"

namespace vdaudit::cluster {
namespace {

// Three tight blobs far apart on the plane.
std::vector<double> blobs(Rng& rng, std::size_t per_blob) {
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  std::vector<double> pts;
  for (const auto& c : centers) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      pts.push_back(c[0] + rng.uniform(-0.5, 0.5));
      pts.push_back(c[1] + rng.uniform(-0.5, 0.5));
    }
  }
  return pts;
}

TEST(KMeans, RecoversSeparatedBlobs) {
  Rng rng(1);
  const auto pts = blobs(rng, 40);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KMeansResult res = kmeans(pts, 2, 3, seed);
    ASSERT_EQ(res.assignment.size(), 120u);
    for (std::size_t b = 0; b < 3; ++b) {
      std::set<int> labels(res.assignment.begin() + 40 * b, res.assignment.begin() + 40 * (b + 1));
      EXPECT_EQ(labels.size(), 1u) << "seed " << seed << " blob " << b;
    }
    EXPECT_LT(res.inertia, 120 * 0.5);
  }
}

TEST(KMeans, AssignmentIsNearestCenter) {
  Rng rng(2);
  std::vector<double> pts(300);
  for (double& v : pts) v = rng.uniform();
  const KMeansResult res = kmeans(pts, 3, 5, 4);
  for (std::size_t i = 0; i < 100; ++i) {
    double best = 1e300;
    int arg = -1;
    for (std::size_t c = 0; c < 5; ++c) {
      double d = 0.0;
      for (std::size_t t = 0; t < 3; ++t) {
        const double diff = pts[i * 3 + t] - res.centers[c * 3 + t];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    EXPECT_EQ(res.assignment[i], arg);
  }
}

TEST(KMeans, DeterministicForASeed) {
  Rng rng(3);
  std::vector<double> pts(400);
  for (double& v : pts) v = rng.uniform();
  const KMeansResult a = kmeans(pts, 4, 6, 11);
  const KMeansResult b = kmeans(pts, 4, 6, 11);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centers, b.centers);
}

TEST(KMeans, IterationCapStillReturnsConsistentAssignment) {
  Rng rng(4);
  std::vector<double> pts(2000);
  for (double& v : pts) v = rng.uniform();
  const KMeansResult res = kmeans(pts, 2, 8, 5, 1);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.assignment.size(), 1000u);
}

TEST(KMeans, RejectsBadK) {
  const std::vector<double> pts{0, 1, 2};
  EXPECT_THROW(kmeans(pts, 1, 0, 0), InvalidArgument);
  EXPECT_THROW(kmeans(pts, 1, 4, 0), InvalidArgument);
  const KMeansResult all = kmeans(pts, 1, 3, 0);
  EXPECT_DOUBLE_EQ(all.inertia, 0.0);
}

TEST(MinMaxScale, UnitRangeAndConstantColumns) {
  std::vector<double> pts{1, 5, 3, 5, 2, 5};
  minmax_scale(pts, 2);
  EXPECT_EQ(pts, (std::vector<double>{0, 0, 1, 0, 0.5, 0}));
}

}  // namespace
}  // namespace vdaudit::cluster
