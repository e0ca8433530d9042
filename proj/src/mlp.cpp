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

#include "vdaudit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vdaudit/error.hpp"

namespace vdaudit::mlp {

nlohmann::json to_json(const Hyper& h) {
  return {{"hidden", h.hidden},
          {"epochs", h.epochs},
          {"learning_rate", h.learning_rate},
          {"batch_size", h.batch_size},
          {"full_batch", h.full_batch}};
}

Hyper hyper_from_json(const nlohmann::json& j) {
  Hyper h;
  h.hidden = j.at("hidden").get<std::size_t>();
  h.epochs = j.at("epochs").get<int>();
  h.learning_rate = j.at("learning_rate").get<double>();
  h.batch_size = j.at("batch_size").get<std::size_t>();
  h.full_batch = j.at("full_batch").get<bool>();
  return h;
}

Network::Network(std::size_t inputs, std::size_t hidden, std::size_t outputs)
    : shape_{inputs, hidden, outputs} {
  if (inputs == 0 || hidden == 0 || outputs < 2) {
    throw InvalidArgument("network needs inputs, hidden units and >= 2 outputs");
  }
  params_.assign(shape_.size(), 0.0);
}

Network Network::initialized(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                             Rng& rng) {
  Network net(inputs, hidden, outputs);
  const auto& s = net.shape_;
  const double a1 = std::sqrt(6.0 / static_cast<double>(inputs));
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + outputs));
  for (std::size_t i = 0; i < hidden * inputs; ++i) net.params_[s.w1() + i] = rng.uniform(-a1, a1);
  for (std::size_t i = 0; i < outputs * hidden; ++i) net.params_[s.w2() + i] = rng.uniform(-a2, a2);
  return net;
}

std::vector<double> Network::predict(std::span<const double> x) const {
  if (x.size() != shape_.inputs) throw InvalidArgument("input width mismatch");
  std::vector<double> out(shape_.outputs);
  kernels::omp::mlp_forward(shape_, params_, x, out);
  return out;
}

nlohmann::json Network::to_json() const {
  const auto at = [&](std::size_t off, std::size_t n) {
    return std::vector<double>(params_.begin() + static_cast<std::ptrdiff_t>(off),
                               params_.begin() + static_cast<std::ptrdiff_t>(off + n));
  };
  return {{"layers",
           {{{"shape", {shape_.hidden, shape_.inputs}},
             {"weights", at(shape_.w1(), shape_.hidden * shape_.inputs)},
             {"bias", at(shape_.b1(), shape_.hidden)},
             {"activation", "relu"}},
            {{"shape", {shape_.outputs, shape_.hidden}},
             {"weights", at(shape_.w2(), shape_.outputs * shape_.hidden)},
             {"bias", at(shape_.b2(), shape_.outputs)},
             {"activation", "softmax"}}}}};
}

Network Network::from_json(const nlohmann::json& j) {
  const auto& layers = j.at("layers");
  if (layers.size() != 2) throw ParseError("expected two layers", 0);
  const auto s1 = layers[0].at("shape").get<std::vector<std::size_t>>();
  const auto s2 = layers[1].at("shape").get<std::vector<std::size_t>>();
  if (s1.size() != 2 || s2.size() != 2 || s2[1] != s1[0]) {
    throw ParseError("inconsistent layer shapes", 0);
  }
  Network net(s1[1], s1[0], s2[0]);
  const auto& s = net.shape_;
  const auto put = [&](const nlohmann::json& src, std::size_t off, std::size_t n) {
    const auto v = src.get<std::vector<double>>();
    if (v.size() != n) throw ParseError("layer array has wrong length", 0);
    std::copy(v.begin(), v.end(), net.params_.begin() + static_cast<std::ptrdiff_t>(off));
  };
  put(layers[0].at("weights"), s.w1(), s.hidden * s.inputs);
  put(layers[0].at("bias"), s.b1(), s.hidden);
  put(layers[1].at("weights"), s.w2(), s.outputs * s.hidden);
  put(layers[1].at("bias"), s.b2(), s.outputs);
  return net;
}

double loss_and_gradient(const Network& net, std::span<const double> x, std::span<const int> y,
                         std::span<double> grad) {
  if (x.size() != y.size() * net.shape().inputs) throw InvalidArgument("batch shape mismatch");
  if (grad.size() != net.shape().size()) throw InvalidArgument("gradient size mismatch");
  return kernels::omp::mlp_loss_gradient(net.shape(), net.parameters(), x, y, grad);
}

TrainLog train(Network& net, std::span<const double> x, std::span<const int> y,
               const Hyper& hyper, Rng& rng) {
  const std::size_t n = y.size();
  const std::size_t d = net.shape().inputs;
  if (x.size() != n * d) throw InvalidArgument("training data shape mismatch");
  if (hyper.batch_size == 0 || hyper.epochs < 0 || !(hyper.learning_rate > 0.0)) {
    throw InvalidArgument("invalid training hyperparameters");
  }
  TrainLog log;
  if (n == 0) return log;

  std::vector<double> grad(net.shape().size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> bx;
  std::vector<int> by;
  auto params = net.parameters();
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    if (hyper.full_batch) {
      loss_and_gradient(net, x, y, grad);
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= hyper.learning_rate * grad[i];
      log.epoch_loss.push_back(loss_and_gradient(net, x, y, grad));
    } else {
      // Running loss: sample-weighted mean of the mini-batch losses.
      double running = 0.0;
      rng.shuffle(order);
      for (std::size_t lo = 0; lo < n; lo += hyper.batch_size) {
        const std::size_t hi = std::min(n, lo + hyper.batch_size);
        bx.clear();
        by.clear();
        for (std::size_t k = lo; k < hi; ++k) {
          bx.insert(bx.end(), x.begin() + static_cast<std::ptrdiff_t>(order[k] * d),
                    x.begin() + static_cast<std::ptrdiff_t>((order[k] + 1) * d));
          by.push_back(y[order[k]]);
        }
        running += loss_and_gradient(net, bx, by, grad) * static_cast<double>(hi - lo);
        for (std::size_t i = 0; i < params.size(); ++i) {
          params[i] -= hyper.learning_rate * grad[i];
        }
      }
      log.epoch_loss.push_back(running / static_cast<double>(n));
    }
  }
  return log;
}

}  // namespace vdaudit::mlp
