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

// Serial reference kernels against their OpenMP versions, at the sizes the
// attack network and FairPick clustering actually see.

#include <vector>

#include "benchmark/benchmark.h"
#include "vdaudit/kernels.hpp"
#include "vdaudit/random.hpp"

namespace {

using vdaudit::kernels::MlpShape;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  vdaudit::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Attack network on a 2-class probability vector; range(0) is the batch size.
template <auto Kernel>
void BM_LossGradient(benchmark::State& state) {
  const MlpShape shape{2, 300, 2};
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = random_vector(shape.size(), 1);
  const auto x = random_vector(n * shape.inputs, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 2);
  std::vector<double> grad(shape.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(shape, params, x, y, grad));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Forward(benchmark::State& state) {
  const MlpShape shape{2, static_cast<std::size_t>(state.range(0)), 2};
  const auto params = random_vector(shape.size(), 3);
  const auto x = random_vector(shape.inputs, 4);
  std::vector<double> out(shape.outputs);
  for (auto _ : state) {
    Kernel(shape, params, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

// range(0) points in 10 dimensions against 40 centers.
template <auto Kernel>
void BM_AssignNearest(benchmark::State& state) {
  constexpr std::size_t kDim = 10, kCenters = 40;
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto points = random_vector(n * kDim, 5);
  const auto centers = random_vector(kCenters * kDim, 6);
  std::vector<int> assignment(n, -1);
  for (auto _ : state) {
    std::fill(assignment.begin(), assignment.end(), -1);
    benchmark::DoNotOptimize(Kernel(points, kDim, centers, assignment));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_LossGradient<vdaudit::kernels::serial::mlp_loss_gradient>)
    ->Name("loss_gradient/serial")->Arg(32)->Arg(1024)->Arg(8192);
BENCHMARK(BM_LossGradient<vdaudit::kernels::omp::mlp_loss_gradient>)
    ->Name("loss_gradient/omp")->Arg(32)->Arg(1024)->Arg(8192);
BENCHMARK(BM_Forward<vdaudit::kernels::serial::mlp_forward>)
    ->Name("forward/serial")->Arg(300)->Arg(4096);
BENCHMARK(BM_Forward<vdaudit::kernels::omp::mlp_forward>)
    ->Name("forward/omp")->Arg(300)->Arg(4096);
BENCHMARK(BM_AssignNearest<vdaudit::kernels::serial::assign_nearest>)
    ->Name("assign_nearest/serial")->Arg(1000)->Arg(20000);
BENCHMARK(BM_AssignNearest<vdaudit::kernels::omp::assign_nearest>)
    ->Name("assign_nearest/omp")->Arg(1000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
