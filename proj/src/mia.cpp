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

#include "vdaudit/mia.hpp"

#include <algorithm>
#include <numeric>

#include "vdaudit/error.hpp"
#include "vdaudit/random.hpp"
#include "vdaudit/serialize.hpp"

namespace vdaudit::mia {

AttackTrainingSet build_attack_training_set(const id3::DecisionTree& target,
                                            const data::Dataset& members,
                                            const data::Dataset& nonmembers) {
  if (members.empty() || nonmembers.empty()) {
    throw InvalidArgument("attack training needs both member and non-member records");
  }
  AttackTrainingSet ats;
  ats.class_count = target.class_count();
  ats.buckets.resize(static_cast<std::size_t>(ats.class_count));
  const auto add = [&](const data::Dataset& ds, int bit) {
    for (std::size_t r = 0; r < ds.size(); ++r) {
      const auto v = target.predict_proba(ds, r);
      Bucket& b = ats.buckets[static_cast<std::size_t>(id3::argmax(v))];
      b.vectors.insert(b.vectors.end(), v.begin(), v.end());
      b.members.push_back(bit);
    }
  };
  add(members, 1);
  add(nonmembers, 0);
  return ats;
}

double ClassAttack::member_probability(std::span<const double> v) const {
  if (!network) return static_cast<double>(constant);
  return network->predict(v)[1];
}

namespace {

ClassAttack train_bucket(const Bucket& bucket, std::size_t width, const mlp::Hyper& hyper,
                         std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    (bucket.members[i] ? pos : neg).push_back(i);
  }
  ClassAttack out;
  if (pos.size() < 2 || neg.size() < 2) {
    out.constant = pos.size() >= neg.size() ? 1 : 0;
    return out;
  }
  Rng rng(seed);
  // Balance the membership prior by undersampling the majority bit.
  std::vector<std::size_t>& major = pos.size() > neg.size() ? pos : neg;
  const std::size_t keep = std::min(pos.size(), neg.size());
  if (major.size() > keep) {
    rng.shuffle(major);
    major.resize(keep);
    std::sort(major.begin(), major.end());
  }
  std::vector<std::size_t> rows;
  rows.reserve(2 * keep);
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(rows));

  std::vector<double> x;
  std::vector<int> y;
  x.reserve(rows.size() * width);
  for (std::size_t r : rows) {
    x.insert(x.end(), bucket.vectors.begin() + static_cast<std::ptrdiff_t>(r * width),
             bucket.vectors.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    y.push_back(bucket.members[r]);
  }
  mlp::Network net = mlp::Network::initialized(width, hyper.hidden, 2, rng);
  mlp::train(net, x, y, hyper, rng);
  out.network = std::move(net);
  return out;
}

}  // namespace

AttackModel train_attack_model(const AttackTrainingSet& ats, const mlp::Hyper& hyper,
                               std::uint64_t seed) {
  AttackModel am;
  am.hyper = hyper;
  am.per_class.resize(ats.buckets.size());
  const auto width = static_cast<std::size_t>(ats.class_count);
  for (std::size_t c = 0; c < ats.buckets.size(); ++c) {
    am.per_class[c] = train_bucket(ats.buckets[c], width, hyper, derive_seed(seed, "bucket", c));
  }
  return am;
}

int infer_membership(const AttackModel& am, std::span<const double> v) {
  const auto c = static_cast<std::size_t>(id3::argmax(v));
  if (c >= am.per_class.size()) throw InvalidArgument("attack model has no such class");
  return am.per_class[c].member_probability(v) >= 0.5 ? 1 : 0;
}

int infer_membership(const AttackModel& am, const id3::DecisionTree& target,
                     std::span<const int> record_codes) {
  return infer_membership(am, target.predict_proba(record_codes));
}

MiaResult evaluate_mia(const AttackModel& am, const id3::DecisionTree& target,
                       const data::Dataset& eval_members,
                       const data::Dataset& eval_nonmembers) {
  MiaResult res;
  res.class_count = target.class_count();
  const auto run = [&](const data::Dataset& ds, std::vector<int>& preds,
                       std::vector<double>& vectors) {
    preds.reserve(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
      const auto v = target.predict_proba(ds, r);
      vectors.insert(vectors.end(), v.begin(), v.end());
      preds.push_back(infer_membership(am, v));
    }
  };
  run(eval_members, res.member_predictions, res.member_vectors);
  run(eval_nonmembers, res.nonmember_predictions, res.nonmember_vectors);
  res.true_positives = static_cast<std::size_t>(
      std::count(res.member_predictions.begin(), res.member_predictions.end(), 1));
  res.false_negatives = res.members() - res.true_positives;
  res.false_positives = static_cast<std::size_t>(
      std::count(res.nonmember_predictions.begin(), res.nonmember_predictions.end(), 1));
  res.true_negatives = res.nonmembers() - res.false_positives;
  const std::size_t predicted = res.true_positives + res.false_positives;
  if (predicted > 0) {
    res.precision = static_cast<double>(res.true_positives) / static_cast<double>(predicted);
  }
  res.recall = res.members() == 0 ? 0.0
                                  : static_cast<double>(res.true_positives) /
                                        static_cast<double>(res.members());
  return res;
}

nlohmann::json AttackModel::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (const ClassAttack& c : per_class) {
    if (c.network) {
      classes.push_back({{"network", c.network->to_json()}});
    } else {
      classes.push_back({{"constant", c.constant}});
    }
  }
  return wrap("attack_model", {{"hyper", mlp::to_json(hyper)}, {"classes", std::move(classes)}});
}

AttackModel AttackModel::from_json(const nlohmann::json& doc) {
  const nlohmann::json& p = unwrap(doc, "attack_model");
  try {
    AttackModel am;
    am.hyper = mlp::hyper_from_json(p.at("hyper"));
    for (const auto& c : p.at("classes")) {
      ClassAttack ca;
      if (c.contains("network")) {
        ca.network = mlp::Network::from_json(c.at("network"));
      } else {
        ca.constant = c.at("constant").get<int>();
      }
      am.per_class.push_back(std::move(ca));
    }
    return am;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed attack model: ") + e.what(), 0);
  }
}

}  // namespace vdaudit::mia
