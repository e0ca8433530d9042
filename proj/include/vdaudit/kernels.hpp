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

// Data-parallel inner loops. Each kernel has a straightforward serial
// reference in `serial::` and an OpenMP version in `omp::` with the same
// signature. The library calls the `omp::` versions; the serial ones are
// kept for equivalence tests and for the benchmark.
//
// The OpenMP versions split work into a fixed number of chunks that does not
// depend on the thread count and reduce partial results in chunk order, so
// their output is identical for any OMP_NUM_THREADS.

#ifndef VDAUDIT_KERNELS_HPP_
#define VDAUDIT_KERNELS_HPP_

#include <cstddef>
#include <span>

namespace vdaudit::kernels {

// Parameter layout of a one-hidden-layer perceptron, flattened as
// [W1 (hidden x inputs), b1 (hidden), W2 (outputs x hidden), b2 (outputs)],
// matrices row-major.
struct MlpShape {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;

  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden * inputs; }
  std::size_t w2() const { return b1() + hidden; }
  std::size_t b2() const { return w2() + outputs * hidden; }
  std::size_t size() const { return b2() + outputs; }

  bool operator==(const MlpShape&) const = default;
};

// Fixed chunk count used by the OpenMP reductions.
inline constexpr std::size_t kReductionChunks = 16;

namespace serial {

// Softmax output of a ReLU hidden layer for one sample.
void mlp_forward(const MlpShape& shape, std::span<const double> params,
                 std::span<const double> x, std::span<double> probabilities);

// Mean cross-entropy over the samples (rows of `x`, labels in `y`) and its
// gradient with respect to `params`, written to `grad`.
double mlp_loss_gradient(const MlpShape& shape, std::span<const double> params,
                         std::span<const double> x, std::span<const int> y,
                         std::span<double> grad);

// Assigns each point (rows of `points`, `dim` columns) to its nearest center
// by squared Euclidean distance, ties to the lowest center index. Returns
// the number of assignments that changed.
std::size_t assign_nearest(std::span<const double> points, std::size_t dim,
                           std::span<const double> centers, std::span<int> assignment);

}  // namespace serial

namespace omp {

void mlp_forward(const MlpShape& shape, std::span<const double> params,
                 std::span<const double> x, std::span<double> probabilities);

double mlp_loss_gradient(const MlpShape& shape, std::span<const double> params,
                         std::span<const double> x, std::span<const int> y,
                         std::span<double> grad);

std::size_t assign_nearest(std::span<const double> points, std::size_t dim,
                           std::span<const double> centers, std::span<int> assignment);

}  // namespace omp

}  // namespace vdaudit::kernels

#endif  // VDAUDIT_KERNELS_HPP_
