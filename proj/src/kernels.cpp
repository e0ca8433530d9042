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

#include "vdaudit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace vdaudit::kernels {
namespace {

// Below these sizes the OpenMP versions run on the calling thread.
constexpr std::size_t kMinParallelSamples = 256;
constexpr std::size_t kMinParallelHidden = 4096;
constexpr std::size_t kMinParallelPoints = 2048;

void softmax(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
}

// Forward + backward for one sample; adds the (unscaled) gradient into
// `grad` and returns the sample loss. `pre` and `out` are scratch space of
// length hidden and outputs.
double accumulate_sample(const MlpShape& s, const double* p, const double* x, int y,
                         double* grad, double* pre, double* out) {
  const double* w1 = p + s.w1();
  const double* b1 = p + s.b1();
  const double* w2 = p + s.w2();
  const double* b2 = p + s.b2();
  for (std::size_t h = 0; h < s.hidden; ++h) {
    double a = b1[h];
    for (std::size_t i = 0; i < s.inputs; ++i) a += w1[h * s.inputs + i] * x[i];
    pre[h] = a;
  }
  for (std::size_t o = 0; o < s.outputs; ++o) {
    double a = b2[o];
    for (std::size_t h = 0; h < s.hidden; ++h) a += w2[o * s.hidden + h] * std::max(pre[h], 0.0);
    out[o] = a;
  }
  softmax({out, s.outputs});
  const double loss = -std::log(std::max(out[y], std::numeric_limits<double>::min()));

  // out becomes dL/dz.
  out[y] -= 1.0;
  double* g_w1 = grad + s.w1();
  double* g_b1 = grad + s.b1();
  double* g_w2 = grad + s.w2();
  double* g_b2 = grad + s.b2();
  for (std::size_t o = 0; o < s.outputs; ++o) {
    g_b2[o] += out[o];
    for (std::size_t h = 0; h < s.hidden; ++h) {
      g_w2[o * s.hidden + h] += out[o] * std::max(pre[h], 0.0);
    }
  }
  for (std::size_t h = 0; h < s.hidden; ++h) {
    if (pre[h] <= 0.0) continue;
    double d = 0.0;
    for (std::size_t o = 0; o < s.outputs; ++o) d += w2[o * s.hidden + h] * out[o];
    g_b1[h] += d;
    for (std::size_t i = 0; i < s.inputs; ++i) g_w1[h * s.inputs + i] += d * x[i];
  }
  return loss;
}

std::size_t nearest(const double* point, std::size_t dim, std::span<const double> centers) {
  const std::size_t k = centers.size() / dim;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    double d = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      const double diff = point[f] - centers[c * dim + f];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

namespace serial {

void mlp_forward(const MlpShape& s, std::span<const double> params, std::span<const double> x,
                 std::span<double> probabilities) {
  const double* p = params.data();
  std::vector<double> hidden(s.hidden);
  for (std::size_t h = 0; h < s.hidden; ++h) {
    double a = p[s.b1() + h];
    for (std::size_t i = 0; i < s.inputs; ++i) a += p[s.w1() + h * s.inputs + i] * x[i];
    hidden[h] = std::max(a, 0.0);
  }
  for (std::size_t o = 0; o < s.outputs; ++o) {
    double a = p[s.b2() + o];
    for (std::size_t h = 0; h < s.hidden; ++h) a += p[s.w2() + o * s.hidden + h] * hidden[h];
    probabilities[o] = a;
  }
  softmax(probabilities.first(s.outputs));
}

double mlp_loss_gradient(const MlpShape& s, std::span<const double> params,
                         std::span<const double> x, std::span<const int> y,
                         std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n = y.size();
  if (n == 0) return 0.0;
  std::vector<double> pre(s.hidden), out(s.outputs);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    loss += accumulate_sample(s, params.data(), x.data() + r * s.inputs, y[r], grad.data(),
                              pre.data(), out.data());
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& g : grad) g *= scale;
  return loss * scale;
}

std::size_t assign_nearest(std::span<const double> points, std::size_t dim,
                           std::span<const double> centers, std::span<int> assignment) {
  std::size_t changed = 0;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    const int c = static_cast<int>(nearest(points.data() + r * dim, dim, centers));
    if (assignment[r] != c) {
      assignment[r] = c;
      ++changed;
    }
  }
  return changed;
}

}  // namespace serial

namespace omp {

void mlp_forward(const MlpShape& s, std::span<const double> params, std::span<const double> x,
                 std::span<double> probabilities) {
  const double* p = params.data();
  std::vector<double> hidden(s.hidden);
  const auto n_hidden = static_cast<long>(s.hidden);
#pragma omp parallel for schedule(static) if (s.hidden >= kMinParallelHidden)
  for (long h = 0; h < n_hidden; ++h) {
    const auto hu = static_cast<std::size_t>(h);
    double a = p[s.b1() + hu];
    for (std::size_t i = 0; i < s.inputs; ++i) a += p[s.w1() + hu * s.inputs + i] * x[i];
    hidden[hu] = std::max(a, 0.0);
  }
  for (std::size_t o = 0; o < s.outputs; ++o) {
    double a = p[s.b2() + o];
    for (std::size_t h = 0; h < s.hidden; ++h) a += p[s.w2() + o * s.hidden + h] * hidden[h];
    probabilities[o] = a;
  }
  softmax(probabilities.first(s.outputs));
}

double mlp_loss_gradient(const MlpShape& s, std::span<const double> params,
                         std::span<const double> x, std::span<const int> y,
                         std::span<double> grad) {
  const std::size_t n = y.size();
  if (n < kMinParallelSamples) return serial::mlp_loss_gradient(s, params, x, y, grad);

  const std::size_t width = s.size();
  std::vector<double> partial(kReductionChunks * width, 0.0);
  std::vector<double> losses(kReductionChunks, 0.0);
  const auto chunks = static_cast<long>(kReductionChunks);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    const std::size_t lo = n * cu / kReductionChunks;
    const std::size_t hi = n * (cu + 1) / kReductionChunks;
    std::vector<double> pre(s.hidden), out(s.outputs);
    double* g = partial.data() + cu * width;
    double loss = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      loss += accumulate_sample(s, params.data(), x.data() + r * s.inputs, y[r], g,
                                pre.data(), out.data());
    }
    losses[cu] = loss;
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t c = 0; c < kReductionChunks; ++c) {
    const double* g = partial.data() + c * width;
    for (std::size_t i = 0; i < width; ++i) grad[i] += g[i];
    loss += losses[c];
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& g : grad) g *= scale;
  return loss * scale;
}

std::size_t assign_nearest(std::span<const double> points, std::size_t dim,
                           std::span<const double> centers, std::span<int> assignment) {
  const auto n = static_cast<long>(assignment.size());
  std::size_t changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed) \
    if (assignment.size() >= kMinParallelPoints)
  for (long r = 0; r < n; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    const int c = static_cast<int>(nearest(points.data() + ru * dim, dim, centers));
    if (assignment[ru] != c) {
      assignment[ru] = c;
      ++changed;
    }
  }
  return changed;
}

}  // namespace omp
}  // namespace vdaudit::kernels
