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

#ifndef VDAUDIT_MLP_HPP_
#define VDAUDIT_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "vdaudit/kernels.hpp"
#include "vdaudit/random.hpp"

namespace vdaudit::mlp {

struct Hyper {
  std::size_t hidden = 300;
  int epochs = 100;
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  // Plain gradient descent on the whole training set each epoch.
  bool full_batch = false;

  bool operator==(const Hyper&) const = default;
};

nlohmann::json to_json(const Hyper& h);
Hyper hyper_from_json(const nlohmann::json& j);

// input -> ReLU hidden layer -> softmax output.
class Network {
 public:
  Network(std::size_t inputs, std::size_t hidden, std::size_t outputs);

  // He-uniform first layer, Glorot-uniform output layer, zero biases.
  static Network initialized(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                             Rng& rng);

  const kernels::MlpShape& shape() const { return shape_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  std::vector<double> predict(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);

  bool operator==(const Network&) const = default;

 private:
  kernels::MlpShape shape_;
  std::vector<double> params_;
};

// Mean cross-entropy of `net` on the rows of `x` (row-major, shape().inputs
// wide) and its gradient.
double loss_and_gradient(const Network& net, std::span<const double> x,
                         std::span<const int> y, std::span<double> grad);

struct TrainLog {
  // Full-batch mode: loss after each epoch's step. Mini-batch mode: the
  // running mean of the batch losses seen during the epoch.
  std::vector<double> epoch_loss;
};

// Mini-batch gradient descent with a reshuffle per epoch (or full-batch
// descent when `hyper.full_batch`).
TrainLog train(Network& net, std::span<const double> x, std::span<const int> y,
               const Hyper& hyper, Rng& rng);

}  // namespace vdaudit::mlp

#endif  // VDAUDIT_MLP_HPP_
