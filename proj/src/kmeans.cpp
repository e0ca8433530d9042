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

#include <algorithm>
#include <limits>

#include "vdaudit/error.hpp"
#include "vdaudit/kernels.hpp"
#include "vdaudit/random.hpp"

namespace vdaudit::cluster {
namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double d = 0.0;
  for (std::size_t f = 0; f < dim; ++f) {
    const double diff = a[f] - b[f];
    d += diff * diff;
  }
  return d;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                    std::uint64_t seed, int max_iterations) {
  if (dim == 0 || points.size() % dim != 0) throw InvalidArgument("bad point matrix");
  const std::size_t n = points.size() / dim;
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (k > n) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                          " points");
  }
  KMeansResult res;
  res.k = k;
  res.dim = dim;
  res.centers.resize(k * dim);
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(points.data() + pick * dim, dim, res.centers.data() + c * dim);
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.data() + i * dim,
                                               res.centers.data() + c * dim, dim));
      total += d2[i];
    }
    if (total <= 0.0) {
      // Every point coincides with a chosen center.
      pick = rng.below(n);
      continue;
    }
    double target = rng.uniform() * total;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= d2[i];
      if (target < 0.0 && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
  }

  res.assignment.assign(n, -1);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> sizes(k);
  for (res.iterations = 0; res.iterations < max_iterations;) {
    const std::size_t changed =
        kernels::omp::assign_nearest(points, dim, res.centers, res.assignment);
    ++res.iterations;
    if (changed == 0) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.assignment[i]);
      ++sizes[c];
      for (std::size_t f = 0; f < dim; ++f) sums[c * dim + f] += points[i * dim + f];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t f = 0; f < dim; ++f) {
        res.centers[c * dim + f] = sums[c * dim + f] / static_cast<double>(sizes[c]);
      }
    }
  }
  if (res.iterations == max_iterations) {
    // Out of iterations right after a center update: re-sync the assignment.
    kernels::omp::assign_nearest(points, dim, res.centers, res.assignment);
  }
  res.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(res.assignment[i]);
    res.inertia += squared_distance(points.data() + i * dim, res.centers.data() + c * dim, dim);
  }
  return res;
}

void minmax_scale(std::span<double> points, std::size_t dim) {
  if (dim == 0) return;
  const std::size_t n = points.size() / dim;
  for (std::size_t f = 0; f < dim; ++f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, points[i * dim + f]);
      hi = std::max(hi, points[i * dim + f]);
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < n; ++i) {
      double& v = points[i * dim + f];
      v = span > 0.0 ? (v - lo) / span : 0.0;
    }
  }
}

}  // namespace vdaudit::cluster
