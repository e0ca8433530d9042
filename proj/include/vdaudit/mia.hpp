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

// Membership inference against a decision tree, strongest-attacker setting:
// the target model doubles as the shadow model, and the attacker holds part
// of the real training and testing data. One binary attack network per
// predicted class maps a probability vector to member / non-member.

#ifndef VDAUDIT_MIA_HPP_
#define VDAUDIT_MIA_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "vdaudit/dataset.hpp"
#include "vdaudit/id3.hpp"
#include "vdaudit/mlp.hpp"

namespace vdaudit::mia {

// Examples routed to one class: probability vectors (row-major,
// class_count wide) and their membership bits.
struct Bucket {
  std::vector<double> vectors;
  std::vector<int> members;

  std::size_t size() const { return members.size(); }
};

struct AttackTrainingSet {
  int class_count = 0;
  std::vector<Bucket> buckets;  // indexed by the target's predicted class
};

// Maps every record through the target and buckets the resulting vectors by
// their argmax. Throws InvalidArgument when either pool is empty.
AttackTrainingSet build_attack_training_set(const id3::DecisionTree& target,
                                            const data::Dataset& members,
                                            const data::Dataset& nonmembers);

// Per-class attack: a trained network, or a constant answer for buckets
// without at least two examples of each membership bit.
struct ClassAttack {
  std::optional<mlp::Network> network;
  int constant = 1;

  double member_probability(std::span<const double> v) const;
  bool operator==(const ClassAttack&) const = default;
};

struct AttackModel {
  mlp::Hyper hyper;
  std::vector<ClassAttack> per_class;

  nlohmann::json to_json() const;
  static AttackModel from_json(const nlohmann::json& doc);
  bool operator==(const AttackModel&) const = default;
};

// Trains one network per bucket after undersampling the majority membership
// bit to balance the bucket. Deterministic for a given seed.
AttackModel train_attack_model(const AttackTrainingSet& ats, const mlp::Hyper& hyper,
                               std::uint64_t seed);

// Membership decision for a target output vector: 1 iff the attack network
// of class argmax(v) gives member probability >= 0.5.
int infer_membership(const AttackModel& am, std::span<const double> v);
int infer_membership(const AttackModel& am, const id3::DecisionTree& target,
                     std::span<const int> record_codes);

struct MiaResult {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;
  // Empty when nothing was predicted a member.
  std::optional<double> precision;
  double recall = 0.0;
  int class_count = 0;
  std::vector<int> member_predictions;
  std::vector<int> nonmember_predictions;
  std::vector<double> member_vectors;     // row-major, class_count wide
  std::vector<double> nonmember_vectors;

  std::size_t members() const { return member_predictions.size(); }
  std::size_t nonmembers() const { return nonmember_predictions.size(); }
};

MiaResult evaluate_mia(const AttackModel& am, const id3::DecisionTree& target,
                       const data::Dataset& eval_members,
                       const data::Dataset& eval_nonmembers);

}  // namespace vdaudit::mia

#endif  // VDAUDIT_MIA_HPP_
