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

// Small synthetic tables shared by the test binaries.

#ifndef VDAUDIT_TESTS_TEST_SUPPORT_HPP_
#define VDAUDIT_TESTS_TEST_SUPPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vdaudit/config.hpp"
#include "vdaudit/dataset.hpp"
#include "vdaudit/random.hpp"
#include "vdaudit/serialize.hpp"

namespace vdaudit::testing {

inline std::filesystem::path data_dir() { return VDAUDIT_DATA_DIR; }

// Columns a0..a{attrs-1} (categorical), "group" (F protected), "label".
inline data::Schema toy_schema(std::size_t attrs) {
  std::vector<data::Column> cols;
  for (std::size_t a = 0; a < attrs; ++a) {
    cols.push_back({"a" + std::to_string(a), data::ColumnKind::kCategorical});
  }
  cols.push_back({"group", data::ColumnKind::kCategorical});
  cols.push_back({"label", data::ColumnKind::kCategorical});
  return data::Schema(cols, "label", {{"group", {"F"}, std::nullopt}});
}

// Uniformly random records; the label is a noisy function of a0 so trees
// have something to learn. Values are "v0", "v1", ... and labels "c0"...
inline data::Dataset random_dataset(Rng& rng, std::size_t rows, std::size_t attrs,
                                    std::size_t domain, std::size_t classes) {
  std::vector<std::vector<std::string>> raw;
  raw.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::string> row;
    std::size_t first = 0;
    for (std::size_t a = 0; a < attrs; ++a) {
      const std::size_t v = rng.below(domain);
      if (a == 0) first = v;
      row.push_back("v" + std::to_string(v));
    }
    row.push_back(rng.uniform() < 0.4 ? "F" : "M");
    const std::size_t c = rng.uniform() < 0.7 ? first % classes : rng.below(classes);
    row.push_back("c" + std::to_string(c));
    raw.push_back(std::move(row));
  }
  return data::Dataset::from_rows(toy_schema(attrs), raw);
}

// Writes a random toy table and its schema into `dir`; returns an
// experiment config pointing at them with a small, fast attack network.
inline config::ExperimentConfig toy_experiment(const std::filesystem::path& dir,
                                               std::size_t rows, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  Rng rng(seed);
  const data::Dataset ds = random_dataset(rng, rows, 4, 3, 2);
  ds.write_csv(dir / "toy.csv");
  write_json(dir / "toy.schema.json", ds.schema().to_json());
  config::ExperimentConfig cfg;
  cfg.dataset = dir / "toy.csv";
  cfg.schema = dir / "toy.schema.json";
  cfg.protected_attribute = "group";
  cfg.depth = 4;
  cfg.epsilons = {1.0};
  cfg.trials = 3;
  cfg.seed = 5;
  cfg.attack.hidden = 8;
  cfg.attack.epochs = 5;
  cfg.out = dir / "out";
  return cfg;
}

}  // namespace vdaudit::testing

#endif  // VDAUDIT_TESTS_TEST_SUPPORT_HPP_
