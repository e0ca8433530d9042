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

// Experiment configuration and its key/value file format.
//
// The format is line oriented. Each non-blank line holds `key = value`;
// `#` starts a comment outside quoted strings. A value is one of
//
//   "text"          string, with \" and \\ escapes
//   12, -3, 0.5e-2  number
//   true, false     boolean
//   none            absent value (for the epsilon and fairpick_t lists)
//   [v, v, ...]     list of the above scalars, possibly empty
//
// Keys may appear at most once. Unknown keys are rejected. Relative paths
// are resolved against the directory of the file they appear in.

#ifndef VDAUDIT_CONFIG_HPP_
#define VDAUDIT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vdaudit/mlp.hpp"

namespace vdaudit::config {

struct ExperimentConfig {
  std::filesystem::path dataset;
  std::filesystem::path schema;
  std::string protected_attribute = "sex";
  int depth = 14;
  // Empty means no private targets; the non-private baseline always runs.
  std::vector<double> epsilons{0.01, 0.05, 0.1, 0.5, 1, 5, 10, 50, 100};
  bool fairpick = false;
  std::vector<double> thresholds{0.4, 0.6, 0.8};
  std::size_t min_per_cluster = 10;
  int refine_passes = 5;
  int trials = 25;
  double train_fraction = 0.5;
  double attack_fraction = 0.15;
  double eval_fraction = 0.20;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out = "out";
  mlp::Hyper attack;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;

  // The fields that determine results; jobs and out are left out so a
  // report does not depend on where or how wide it was produced.
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses the document into a JSON object of its keys; throws ConfigError
// with the line number on malformed input.
nlohmann::json parse_document(std::istream& in);

// Applies one key to `cfg`; relative paths are joined to `base`.
void apply_key(ExperimentConfig& cfg, std::string_view key, const nlohmann::json& value,
               const std::filesystem::path& base = {});

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// "none" gives an empty list, otherwise comma separated numbers with or
// without surrounding brackets.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace vdaudit::config

#endif  // VDAUDIT_CONFIG_HPP_
