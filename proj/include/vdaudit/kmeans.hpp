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

#ifndef VDAUDIT_KMEANS_HPP_
#define VDAUDIT_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vdaudit::cluster {

struct KMeansResult {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centers;  // k x dim, row-major
  std::vector<int> assignment;
  int iterations = 0;
  double inertia = 0.0;  // sum of squared distances to assigned centers
};

// Lloyd's algorithm from a seeded k-means++ start, until the assignment
// stops changing or `max_iterations` is reached. A center that loses all of
// its points keeps its position. Throws InvalidArgument when k is 0 or
// larger than the number of points.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, int max_iterations = 100);

// Rescales each column of `points` to [0, 1] in place; constant columns
// become 0.
void minmax_scale(std::span<double> points, std::size_t dim);

}  // namespace vdaudit::cluster

#endif  // VDAUDIT_KMEANS_HPP_
