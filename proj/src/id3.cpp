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

#include "vdaudit/id3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "vdaudit/error.hpp"
#include "vdaudit/random.hpp"
#include "vdaudit/serialize.hpp"

namespace vdaudit::id3 {

double sample_laplace(double scale, double u) {
  if (!(scale > 0.0)) throw InvalidArgument("Laplace scale must be positive");
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("Laplace variate must lie in (0, 1)");
  const double d = u - 0.5;
  const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  return -scale * sign * std::log(1.0 - 2.0 * std::abs(d));
}

double split_score(std::span<const double> branch_counts,
                   std::span<const double> class_counts, int class_count) {
  const auto c_count = static_cast<std::size_t>(class_count);
  double score = 0.0;
  for (std::size_t j = 0; j < branch_counts.size(); ++j) {
    const double nj = std::max(branch_counts[j], kLogFloor);
    for (std::size_t c = 0; c < c_count; ++c) {
      const double njc = class_counts[j * c_count + c];
      if (njc == 0.0) continue;
      score += njc * std::log(std::max(njc, kLogFloor) / nj);
    }
  }
  return score;
}

int argmax(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

DecisionTree::DecisionTree(int class_count, int depth_limit, std::vector<Node> nodes,
                           std::vector<double> probabilities)
    : class_count_(class_count),
      depth_limit_(depth_limit),
      nodes_(std::move(nodes)),
      probabilities_(std::move(probabilities)) {
  if (class_count_ <= 0) throw InvalidArgument("class_count must be positive");
  if (nodes_.empty()) throw InvalidArgument("a tree needs at least one node");
  if (probabilities_.size() != nodes_.size() * static_cast<std::size_t>(class_count_)) {
    throw InvalidArgument("one class distribution per node expected");
  }
  for (const Node& n : nodes_) {
    if (!n.is_leaf() && n.first_child + n.child_count > nodes_.size()) {
      throw InvalidArgument("child index out of range");
    }
  }
}

std::span<const double> DecisionTree::predict_proba(std::span<const int> codes) const {
  std::size_t at = 0;
  for (;;) {
    const Node& n = nodes_[at];
    if (n.is_leaf()) return distribution(at);
    const int v = codes[static_cast<std::size_t>(n.attribute)];
    if (v < 0 || static_cast<std::uint32_t>(v) >= n.child_count) return distribution(at);
    at = n.first_child + static_cast<std::uint32_t>(v);
  }
}

int DecisionTree::depth() const {
  // Children always follow their parent in the node array.
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.is_leaf()) {
      deepest = std::max(deepest, d[i]);
      continue;
    }
    for (std::uint32_t k = 0; k < n.child_count; ++k) d[n.first_child + k] = d[i] + 1;
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const auto dist = distribution(i);
    nlohmann::json j = {{"p", std::vector<double>(dist.begin(), dist.end())}};
    if (!n.is_leaf()) {
      j["split"] = n.attribute;
      j["first_child"] = n.first_child;
      j["branches"] = n.child_count;
    }
    nodes.push_back(std::move(j));
  }
  return wrap("id3_tree", {{"class_count", class_count_},
                           {"depth_limit", depth_limit_},
                           {"nodes", std::move(nodes)}});
}

DecisionTree DecisionTree::from_json(const nlohmann::json& doc) {
  const nlohmann::json& p = unwrap(doc, "id3_tree");
  try {
    const int classes = p.at("class_count").get<int>();
    std::vector<Node> nodes;
    std::vector<double> probs;
    for (const auto& j : p.at("nodes")) {
      Node n;
      if (j.contains("split")) {
        n.attribute = j.at("split").get<int>();
        n.first_child = j.at("first_child").get<std::uint32_t>();
        n.child_count = j.at("branches").get<std::uint32_t>();
      }
      const auto dist = j.at("p").get<std::vector<double>>();
      if (dist.size() != static_cast<std::size_t>(classes)) {
        throw ParseError("node distribution has wrong length", 0);
      }
      probs.insert(probs.end(), dist.begin(), dist.end());
      nodes.push_back(n);
    }
    return DecisionTree(classes, p.at("depth_limit").get<int>(), std::move(nodes),
                        std::move(probs));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed tree: ") + e.what(), 0);
  }
}

namespace {

// Exact counts; never touches a random stream.
struct ExactCounts {
  double leaf(std::size_t n) { return static_cast<double>(n); }
  double split(std::size_t n, std::size_t) { return static_cast<double>(n); }
};

struct LaplaceCounts {
  double epsilon;
  bool enabled;
  Rng rng;

  double leaf(std::size_t n) {
    const double exact = static_cast<double>(n);
    if (!enabled) return exact;
    double noisy = -1.0;
    while (noisy < 0.0) noisy = exact + sample_laplace(1.0 / epsilon, rng.uniform_open());
    return noisy;
  }
  double split(std::size_t n, std::size_t m) {
    const double exact = static_cast<double>(n);
    if (!enabled) return exact;
    return exact + sample_laplace(2.0 * static_cast<double>(m) / epsilon, rng.uniform_open());
  }
};

template <typename Counts>
class Builder {
 public:
  Builder(const data::Dataset& ds, Counts counts)
      : ds_(ds),
        classes_(static_cast<std::size_t>(ds.class_count())),
        class_col_(ds.schema().class_index()),
        counts_(std::move(counts)) {}

  DecisionTree build(int depth) {
    std::vector<std::uint32_t> rows(ds_.size());
    for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < ds_.width(); ++c) {
      if (c != class_col_) candidates.push_back(c);
    }
    nodes_.emplace_back();
    probs_.resize(classes_);
    const std::vector<double> uniform(classes_, 1.0 / static_cast<double>(classes_));
    grow(0, rows, candidates, depth, uniform);
    return DecisionTree(static_cast<int>(classes_), depth, std::move(nodes_),
                        std::move(probs_));
  }

 private:
  void set_distribution(std::size_t node, std::span<const double> weights,
                        std::span<const double> fallback) {
    double total = 0.0;
    for (double w : weights) total += w;
    double* out = probs_.data() + node * classes_;
    for (std::size_t c = 0; c < classes_; ++c) {
      out[c] = total > 0.0 ? weights[c] / total : fallback[c];
    }
  }

  void make_leaf(std::size_t node, std::span<const std::size_t> class_counts,
                 std::span<const double> parent) {
    std::vector<double> noisy(classes_);
    for (std::size_t c = 0; c < classes_; ++c) noisy[c] = counts_.leaf(class_counts[c]);
    set_distribution(node, noisy, parent);
  }

  void grow(std::size_t node, const std::vector<std::uint32_t>& rows,
            const std::vector<std::size_t>& candidates, int depth,
            const std::vector<double>& parent) {
    std::vector<std::size_t> class_counts(classes_, 0);
    for (std::uint32_t r : rows) ++class_counts[static_cast<std::size_t>(ds_.label(r))];
    const auto present = std::count_if(class_counts.begin(), class_counts.end(),
                                       [](std::size_t n) { return n > 0; });
    if (candidates.empty() || depth <= 0 || present <= 1) {
      make_leaf(node, class_counts, parent);
      return;
    }

    const std::size_t m = candidates.size();
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    std::vector<double> best_class_counts;
    std::vector<std::size_t> table;
    std::vector<double> nj, njc;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t col = candidates[k];
      const auto domain = static_cast<std::size_t>(ds_.domain_size(col));
      table.assign(domain * classes_, 0);
      for (std::uint32_t r : rows) {
        const auto v = static_cast<std::size_t>(ds_.code(r, col));
        ++table[v * classes_ + static_cast<std::size_t>(ds_.label(r))];
      }
      nj.assign(domain, 0.0);
      njc.assign(domain * classes_, 0.0);
      for (std::size_t j = 0; j < domain; ++j) {
        std::size_t branch = 0;
        for (std::size_t c = 0; c < classes_; ++c) branch += table[j * classes_ + c];
        nj[j] = counts_.split(branch, m);
        for (std::size_t c = 0; c < classes_; ++c) {
          njc[j * classes_ + c] = counts_.split(table[j * classes_ + c], m);
        }
      }
      const double score = split_score(nj, njc, static_cast<int>(classes_));
      if (score > best_score) {
        best_score = score;
        best = k;
        best_class_counts = njc;
      }
    }

    const std::size_t col = candidates[best];
    const auto domain = static_cast<std::size_t>(ds_.domain_size(col));
    // Fallback distribution: the chosen split's (noisy) per-class totals.
    std::vector<double> totals(classes_, 0.0);
    for (std::size_t j = 0; j < domain; ++j) {
      for (std::size_t c = 0; c < classes_; ++c) {
        totals[c] += std::max(best_class_counts[j * classes_ + c], 0.0);
      }
    }
    set_distribution(node, totals, parent);
    const std::vector<double> own(probs_.begin() + static_cast<std::ptrdiff_t>(node * classes_),
                                  probs_.begin() + static_cast<std::ptrdiff_t>((node + 1) * classes_));

    const auto first = static_cast<std::uint32_t>(nodes_.size());
    nodes_[node].attribute = static_cast<int>(col);
    nodes_[node].first_child = first;
    nodes_[node].child_count = static_cast<std::uint32_t>(domain);
    nodes_.resize(nodes_.size() + domain);
    probs_.resize(nodes_.size() * classes_);

    std::vector<std::vector<std::uint32_t>> parts(domain);
    for (std::uint32_t r : rows) parts[static_cast<std::size_t>(ds_.code(r, col))].push_back(r);
    std::vector<std::size_t> rest;
    rest.reserve(m - 1);
    for (std::size_t k = 0; k < m; ++k) {
      if (k != best) rest.push_back(candidates[k]);
    }
    for (std::size_t j = 0; j < domain; ++j) {
      std::vector<std::uint32_t> part = std::move(parts[j]);
      grow(first + j, part, rest, depth - 1, own);
    }
  }

  const data::Dataset& ds_;
  std::size_t classes_;
  std::size_t class_col_;
  Counts counts_;
  std::vector<Node> nodes_;
  std::vector<double> probs_;
};

void check_training_input(const data::Dataset& train, int depth) {
  if (train.empty()) throw InvalidArgument("cannot train on an empty dataset");
  if (depth < 0) throw InvalidArgument("tree depth must be non-negative");
}

}  // namespace

DecisionTree train_id3(const data::Dataset& train, int depth) {
  check_training_input(train, depth);
  return Builder<ExactCounts>(train, ExactCounts{}).build(depth);
}

DecisionTree train_dp_id3(const data::Dataset& train, int depth, const DpConfig& dp,
                          std::uint64_t seed) {
  check_training_input(train, depth);
  if (!(dp.epsilon > 0.0) || !std::isfinite(dp.epsilon)) {
    throw InvalidArgument("privacy budget epsilon must be positive");
  }
  return Builder<LaplaceCounts>(train, LaplaceCounts{dp.epsilon, dp.noise_enabled, Rng(seed)})
      .build(depth);
}

double accuracy(const DecisionTree& tree, const data::Dataset& ds) {
  if (ds.empty()) throw InvalidArgument("accuracy of an empty dataset is undefined");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (argmax(tree.predict_proba(ds, r)) == ds.label(r)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace vdaudit::id3
