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


// The OpenMP kernels must agree with their serial references up to
// floating-point reassociation, and must not depend on the thread count.

#include "vdaudit/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

#include "gtest/gtest.h"
#include "vdaudit/random.hpp"

namespace vdaudit::kernels {
namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

TEST(MlpForward, SoftmaxSumsToOne) {
  Rng rng(1);
  const MlpShape shape{4, 7, 3};
  const auto params = random_vector(rng, shape.size(), 1.0);
  const auto x = random_vector(rng, 4, 2.0);
  std::vector<double> p(3);
  serial::mlp_forward(shape, params, x, p);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
  for (double v : p) EXPECT_GT(v, 0.0);
}

TEST(MlpForward, HandComputedExample) {
  // One input, two hidden units, two outputs.
  const MlpShape shape{1, 2, 2};
  // W1 = [1, -1], b1 = [0, 0], W2 = [[1, 0], [0, 1]], b2 = [0, 0].
  const std::vector<double> params{1, -1, 0, 0, 1, 0, 0, 1, 0, 0};
  const std::vector<double> x{2.0};
  std::vector<double> p(2);
  serial::mlp_forward(shape, params, x, p);
  // Hidden = relu([2, -2]) = [2, 0]; logits [2, 0].
  EXPECT_NEAR(p[0], std::exp(2.0) / (std::exp(2.0) + 1.0), 1e-12);
}

TEST(MlpForward, LargeLogitsStayFinite) {
  const MlpShape shape{1, 1, 2};
  const std::vector<double> params{1000, 0, 1000, -1000, 0, 0};
  const std::vector<double> x{5.0};
  std::vector<double> p(2);
  omp::mlp_forward(shape, params, x, p);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(Equivalence, ForwardMatchesSerial) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const MlpShape shape{1 + rng.below(6), 1 + rng.below(400), 2 + rng.below(3)};
    const auto params = random_vector(rng, shape.size(), 0.5);
    const auto x = random_vector(rng, shape.inputs, 1.0);
    std::vector<double> a(shape.outputs), b(shape.outputs);
    serial::mlp_forward(shape, params, x, a);
    omp::mlp_forward(shape, params, x, b);
    ASSERT_EQ(a, b);
  }
}

TEST(Equivalence, LossGradientMatchesSerial) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MlpShape shape{1 + rng.below(4), 1 + rng.below(50), 2};
    const std::size_t n = 1 + rng.below(300);
    const auto params = random_vector(rng, shape.size(), 0.5);
    const auto x = random_vector(rng, n * shape.inputs, 1.0);
    std::vector<int> y(n);
    for (int& v : y) v = static_cast<int>(rng.below(2));
    std::vector<double> ga(shape.size()), gb(shape.size());
    const double la = serial::mlp_loss_gradient(shape, params, x, y, ga);
    const double lb = omp::mlp_loss_gradient(shape, params, x, y, gb);
    ASSERT_NEAR(la, lb, 1e-12 * std::abs(la));
    for (std::size_t i = 0; i < ga.size(); ++i) ASSERT_NEAR(ga[i], gb[i], 1e-12);
  }
}

TEST(Equivalence, LossGradientIgnoresThreadCount) {
  Rng rng(5);
  const MlpShape shape{2, 300, 2};
  const std::size_t n = 777;
  const auto params = random_vector(rng, shape.size(), 0.5);
  const auto x = random_vector(rng, n * shape.inputs, 1.0);
  std::vector<int> y(n);
  for (int& v : y) v = static_cast<int>(rng.below(2));
  const int saved = omp_get_max_threads();
  std::vector<double> reference(shape.size());
  omp_set_num_threads(1);
  const double l1 = omp::mlp_loss_gradient(shape, params, x, y, reference);
  for (int threads : {2, 3, 8}) {
    omp_set_num_threads(threads);
    std::vector<double> g(shape.size());
    EXPECT_EQ(omp::mlp_loss_gradient(shape, params, x, y, g), l1) << threads << " threads";
    EXPECT_EQ(g, reference) << threads << " threads";
  }
  omp_set_num_threads(saved);
}

TEST(Equivalence, AssignNearestMatchesSerial) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + rng.below(5), n = 1 + rng.below(500), k = 1 + rng.below(8);
    const auto points = random_vector(rng, n * dim, 1.0);
    const auto centers = random_vector(rng, k * dim, 1.0);
    std::vector<int> a(n, -1), b(n, -1);
    const std::size_t ca = serial::assign_nearest(points, dim, centers, a);
    const std::size_t cb = omp::assign_nearest(points, dim, centers, b);
    ASSERT_EQ(ca, cb);
    ASSERT_EQ(a, b);
    EXPECT_EQ(ca, n);  // every point moved away from -1
    EXPECT_EQ(serial::assign_nearest(points, dim, centers, a), 0u);
  }
}

TEST(AssignNearest, TiesGoToLowestCenter) {
  const std::vector<double> points{0.0};
  const std::vector<double> centers{1.0, -1.0};
  std::vector<int> assignment{-1};
  omp::assign_nearest(points, 1, centers, assignment);
  EXPECT_EQ(assignment[0], 0);
}

}  // namespace
}  // namespace vdaudit::kernels
