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

// Tabular datasets: schema-driven loading, categorical encoding, numeric
// discretization for tree splitting, splitting, and protected-group tags.

#ifndef VDAUDIT_DATASET_HPP_
#define VDAUDIT_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace vdaudit::data {

enum class ColumnKind { kCategorical, kNumeric };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;
};

// Raw value -> protected/unprotected for one protected column. When
// `unprotected_values` is absent every value outside `protected_values` is
// unprotected; when present, values in neither list are unmapped.
struct GroupMap {
  std::string column;
  std::vector<std::string> protected_values;
  std::optional<std::vector<std::string>> unprotected_values;

  // nullopt for an unmapped value.
  std::optional<bool> is_protected(std::string_view raw) const;
};

class Schema {
 public:
  // Throws SchemaError when names repeat, the class column or a protected
  // column is missing, or a protected column is numeric.
  Schema(std::vector<Column> columns, std::string class_column,
         std::vector<GroupMap> protected_columns,
         std::vector<std::string> missing_tokens = {});

  static Schema from_json(const nlohmann::json& doc);
  static Schema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<Column>& columns() const { return columns_; }
  const std::string& class_column() const { return class_column_; }
  const std::vector<GroupMap>& protected_columns() const {
    return protected_;
  }
  const std::vector<std::string>& missing_tokens() const {
    return missing_tokens_;
  }

  std::size_t width() const { return columns_.size(); }
  // Every column except the class column.
  std::size_t attribute_count() const { return columns_.size() - 1; }
  std::size_t class_index() const { return class_index_; }

  // Throws SchemaError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;
  // Throws InvalidArgument when `column` is not protected.
  const GroupMap& group_map(std::string_view column) const;
  bool is_missing(std::string_view token) const;

 private:
  std::vector<Column> columns_;
  std::string class_column_;
  std::vector<GroupMap> protected_;
  std::vector<std::string> missing_tokens_;
  std::size_t class_index_ = 0;
};

// Bijection raw string <-> integer code in first-appearance order.
class Encoder {
 public:
  int encode(std::string_view raw);  // adds unseen values
  std::optional<int> find(std::string_view raw) const;
  const std::string& decode(int code) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<std::string>& values() const { return values_; }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, int> codes_;
};

// Number of quantile bins used for numeric columns.
inline constexpr int kNumericBins = 10;

// Interior cut points splitting `values` into up to `bins` quantile bins.
// Duplicate cuts are merged, so heavily tied columns get fewer bins.
std::vector<double> quantile_cuts(std::vector<double> values, int bins);

// Shared, immutable column metadata of a loaded dataset and all of its
// subsets.
struct Codec {
  Schema schema;
  std::vector<Encoder> encoders;           // empty for numeric columns
  std::vector<std::vector<double>> cuts;   // empty for categorical columns
};

// Row-major table of encoded values. Categorical cells hold their code as a
// double; numeric cells hold the parsed value. Each record also carries a
// stable id (its row position in the originally loaded table) and a cached
// discrete attribute code per column for tree splitting.
class Dataset {
 public:
  Dataset() = default;

  // Builds a dataset from raw string rows aligned with the schema columns.
  // Rows with a missing cell are dropped. `lines` (optional) gives source
  // line numbers for error messages.
  static Dataset from_rows(const Schema& schema,
                           const std::vector<std::vector<std::string>>& rows,
                           std::span<const std::size_t> lines = {});

  const Schema& schema() const { return codec_->schema; }
  const Codec& codec() const { return *codec_; }
  const std::shared_ptr<const Codec>& codec_ptr() const { return codec_; }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t width() const { return codec_ ? schema().width() : 0; }

  std::span<const double> record(std::size_t row) const {
    return {values_.data() + row * width(), width()};
  }
  double value(std::size_t row, std::size_t col) const {
    return values_[row * width() + col];
  }
  // Discrete value used by the decision tree: the code for categorical
  // columns, the quantile bin for numeric ones.
  int code(std::size_t row, std::size_t col) const {
    return codes_[row * width() + col];
  }
  std::span<const int> codes(std::size_t row) const {
    return {codes_.data() + row * width(), width()};
  }
  // Number of distinct discrete values column `col` can take.
  int domain_size(std::size_t col) const;

  int label(std::size_t row) const { return code(row, schema().class_index()); }
  int class_count() const {
    return domain_size(schema().class_index());
  }
  std::uint64_t id(std::size_t row) const { return ids_[row]; }
  std::span<const std::uint64_t> ids() const { return ids_; }

  // Decoded cell as it appeared in the input.
  std::string raw(std::size_t row, std::size_t col) const;

  // Rows in the given order; shares the codec.
  Dataset subset(std::span<const std::size_t> rows) const;
  // Throws InvalidArgument when the parts were not loaded together.
  static Dataset concat(std::span<const Dataset> parts);

  void write_csv(const std::filesystem::path& path) const;
  void write_csv(std::ostream& out) const;

 private:
  std::shared_ptr<const Codec> codec_;
  std::vector<double> values_;
  std::vector<int> codes_;
  std::vector<std::uint64_t> ids_;
};

// Parses the CSV at `path`; the header must list exactly the schema columns
// in order. Throws ParseError (with line), SchemaError, GroupMapError.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset load_csv(std::istream& in, const Schema& schema);

struct SplitSpec {
  double train_fraction = 0.5;
  double attack_fraction = 0.15;
  double eval_fraction = 0.20;
  std::uint64_t seed = 0;
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

// Seeded random partition with |train| = round(train_fraction * |ds|).
TrainTest split(const Dataset& ds, const SplitSpec& spec);

enum class Group : std::uint8_t { kUnprotected = 0, kProtected = 1 };

struct GroupAssignment {
  std::string attribute;
  std::vector<Group> labels;  // aligned with dataset rows

  std::size_t count(Group g) const;
};

GroupAssignment binarize_group(const Dataset& ds, std::string_view attribute);

// Histogram of raw values of a categorical column in encoder order.
std::vector<std::pair<std::string, std::size_t>> group_skew(
    const Dataset& ds, std::string_view attribute);

struct AttackData {
  Dataset attack_members;     // from the target's training data
  Dataset attack_nonmembers;  // from the target's testing data
  Dataset eval_members;
  Dataset eval_nonmembers;
};

// Draws attack and evaluation subsets without replacement; attack and
// evaluation subsets are disjoint within each source.
AttackData sample_attack_data(const Dataset& train, const Dataset& test,
                              const SplitSpec& spec);

}  // namespace vdaudit::data

#endif  // VDAUDIT_DATASET_HPP_
