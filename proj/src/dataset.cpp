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

#include "vdaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "vdaudit/csv.hpp"
#include "vdaudit/error.hpp"
#include "vdaudit/random.hpp"

namespace vdaudit::data {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool contains(const std::vector<std::string>& values, std::string_view v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

}  // namespace

std::optional<bool> GroupMap::is_protected(std::string_view raw) const {
  if (contains(protected_values, raw)) return true;
  if (!unprotected_values || contains(*unprotected_values, raw)) return false;
  return std::nullopt;
}

Schema::Schema(std::vector<Column> columns, std::string class_column,
               std::vector<GroupMap> protected_columns,
               std::vector<std::string> missing_tokens)
    : columns_(std::move(columns)),
      class_column_(std::move(class_column)),
      protected_(std::move(protected_columns)),
      missing_tokens_(std::move(missing_tokens)) {
  std::set<std::string> seen;
  for (const Column& c : columns_) {
    if (!seen.insert(c.name).second) {
      throw SchemaError("duplicate column name '" + c.name + "'");
    }
  }
  const auto cls = find(class_column_);
  if (!cls) throw SchemaError("class column '" + class_column_ + "' not in columns");
  if (columns_[*cls].kind != ColumnKind::kCategorical) {
    throw SchemaError("class column '" + class_column_ + "' must be categorical");
  }
  class_index_ = *cls;
  for (const GroupMap& g : protected_) {
    const auto idx = find(g.column);
    if (!idx) throw SchemaError("protected column '" + g.column + "' not in columns");
    if (columns_[*idx].kind != ColumnKind::kCategorical) {
      throw SchemaError("protected column '" + g.column + "' must be categorical");
    }
  }
}

Schema Schema::from_json(const nlohmann::json& doc) {
  try {
    std::vector<Column> columns;
    for (const auto& c : doc.at("columns")) {
      const std::string kind = c.at("kind").get<std::string>();
      ColumnKind k;
      if (kind == "categorical") {
        k = ColumnKind::kCategorical;
      } else if (kind == "numeric") {
        k = ColumnKind::kNumeric;
      } else {
        throw SchemaError("unknown column kind '" + kind + "'");
      }
      columns.push_back({c.at("name").get<std::string>(), k});
    }
    std::vector<GroupMap> groups;
    if (doc.contains("protected")) {
      for (const auto& p : doc.at("protected")) {
        GroupMap g;
        g.column = p.at("column").get<std::string>();
        g.protected_values = p.at("protected_values").get<std::vector<std::string>>();
        if (p.contains("unprotected_values")) {
          g.unprotected_values =
              p.at("unprotected_values").get<std::vector<std::string>>();
        }
        groups.push_back(std::move(g));
      }
    }
    std::vector<std::string> missing;
    if (doc.contains("missing_tokens")) {
      missing = doc.at("missing_tokens").get<std::vector<std::string>>();
    }
    return Schema(std::move(columns), doc.at("class_column").get<std::string>(),
                  std::move(groups), std::move(missing));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schema ") + path.string() + ": " + e.what(), 0);
  }
  return from_json(doc);
}

nlohmann::json Schema::to_json() const {
  nlohmann::json doc;
  doc["columns"] = nlohmann::json::array();
  for (const Column& c : columns_) {
    doc["columns"].push_back(
        {{"name", c.name},
         {"kind", c.kind == ColumnKind::kNumeric ? "numeric" : "categorical"}});
  }
  doc["class_column"] = class_column_;
  doc["protected"] = nlohmann::json::array();
  for (const GroupMap& g : protected_) {
    nlohmann::json p = {{"column", g.column}, {"protected_values", g.protected_values}};
    if (g.unprotected_values) p["unprotected_values"] = *g.unprotected_values;
    doc["protected"].push_back(std::move(p));
  }
  doc["missing_tokens"] = missing_tokens_;
  return doc;
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw SchemaError("unknown column '" + std::string(name) + "'");
}

const GroupMap& Schema::group_map(std::string_view column) const {
  for (const GroupMap& g : protected_) {
    if (g.column == column) return g;
  }
  throw InvalidArgument("'" + std::string(column) + "' is not a protected column");
}

bool Schema::is_missing(std::string_view token) const {
  return token.empty() || contains(missing_tokens_, token);
}

int Encoder::encode(std::string_view raw) {
  std::string key(raw);
  auto it = codes_.find(key);
  if (it != codes_.end()) return it->second;
  const int code = static_cast<int>(values_.size());
  values_.push_back(key);
  codes_.emplace(std::move(key), code);
  return code;
}

std::optional<int> Encoder::find(std::string_view raw) const {
  auto it = codes_.find(std::string(raw));
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

const std::string& Encoder::decode(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= values_.size()) {
    throw InvalidArgument("code " + std::to_string(code) + " out of range");
  }
  return values_[static_cast<std::size_t>(code)];
}

std::vector<double> quantile_cuts(std::vector<double> values, int bins) {
  std::vector<double> cuts;
  if (values.empty() || bins < 2) return cuts;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  for (int k = 1; k < bins; ++k) {
    const double q = values[static_cast<std::size_t>(k) * n / bins];
    if (q > values.front() && (cuts.empty() || q > cuts.back())) cuts.push_back(q);
  }
  return cuts;
}

namespace {

int bin_of(const std::vector<double>& cuts, double v) {
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

}  // namespace

Dataset Dataset::from_rows(const Schema& schema,
                           const std::vector<std::vector<std::string>>& rows,
                           std::span<const std::size_t> lines) {
  const std::size_t w = schema.width();
  auto codec = std::make_shared<Codec>(Codec{schema, {}, {}});
  codec->encoders.resize(w);
  codec->cuts.resize(w);

  Dataset ds;
  std::vector<std::vector<std::string>> unmapped(w);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t line = r < lines.size() ? lines[r] : 0;
    const auto& row = rows[r];
    if (row.size() != w) {
      throw ParseError("expected " + std::to_string(w) + " fields, found " +
                           std::to_string(row.size()),
                       line);
    }
    bool missing = false;
    for (const std::string& cell : row) {
      if (schema.is_missing(trim(cell))) {
        missing = true;
        break;
      }
    }
    if (missing) continue;
    for (std::size_t c = 0; c < w; ++c) {
      const std::string_view cell = trim(row[c]);
      if (schema.columns()[c].kind == ColumnKind::kNumeric) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
          throw ParseError("column '" + schema.columns()[c].name +
                               "': not a number: '" + std::string(cell) + "'",
                           line);
        }
        ds.values_.push_back(v);
      } else {
        ds.values_.push_back(codec->encoders[c].encode(cell));
      }
    }
    ds.ids_.push_back(ds.ids_.size());
  }

  for (const GroupMap& g : schema.protected_columns()) {
    const std::size_t c = schema.index_of(g.column);
    std::vector<std::string> bad;
    for (const std::string& v : codec->encoders[c].values()) {
      if (!g.is_protected(v)) bad.push_back(v);
    }
    if (!bad.empty()) {
      std::string msg = "group map for '" + g.column + "' does not cover:";
      for (const auto& v : bad) msg += " '" + v + "'";
      throw GroupMapError(msg);
    }
  }

  const std::size_t n = ds.ids_.size();
  for (std::size_t c = 0; c < w; ++c) {
    if (schema.columns()[c].kind != ColumnKind::kNumeric) continue;
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = ds.values_[r * w + c];
    codec->cuts[c] = quantile_cuts(std::move(col), kNumericBins);
  }
  ds.codes_.resize(ds.values_.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double v = ds.values_[r * w + c];
      ds.codes_[r * w + c] = schema.columns()[c].kind == ColumnKind::kNumeric
                                 ? bin_of(codec->cuts[c], v)
                                 : static_cast<int>(v);
    }
  }
  ds.codec_ = std::move(codec);
  return ds;
}

int Dataset::domain_size(std::size_t col) const {
  if (schema().columns()[col].kind == ColumnKind::kNumeric) {
    return static_cast<int>(codec_->cuts[col].size()) + 1;
  }
  return static_cast<int>(codec_->encoders[col].size());
}

std::string Dataset::raw(std::size_t row, std::size_t col) const {
  const double v = value(row, col);
  if (schema().columns()[col].kind == ColumnKind::kNumeric) return format_number(v);
  return codec_->encoders[col].decode(static_cast<int>(v));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.codec_ = codec_;
  const std::size_t w = width();
  out.values_.reserve(rows.size() * w);
  out.codes_.reserve(rows.size() * w);
  out.ids_.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw InvalidArgument("subset row out of range");
    out.values_.insert(out.values_.end(), values_.begin() + r * w,
                       values_.begin() + (r + 1) * w);
    out.codes_.insert(out.codes_.end(), codes_.begin() + r * w,
                      codes_.begin() + (r + 1) * w);
    out.ids_.push_back(ids_[r]);
  }
  return out;
}

Dataset Dataset::concat(std::span<const Dataset> parts) {
  Dataset out;
  for (const Dataset& p : parts) {
    if (!p.codec_) continue;
    if (!out.codec_) {
      out.codec_ = p.codec_;
    } else if (out.codec_ != p.codec_) {
      throw InvalidArgument("cannot concatenate datasets from different loads");
    }
    out.values_.insert(out.values_.end(), p.values_.begin(), p.values_.end());
    out.codes_.insert(out.codes_.end(), p.codes_.begin(), p.codes_.end());
    out.ids_.insert(out.ids_.end(), p.ids_.begin(), p.ids_.end());
  }
  return out;
}

void Dataset::write_csv(std::ostream& out) const {
  std::vector<std::string> fields;
  for (const Column& c : schema().columns()) fields.push_back(c.name);
  csv::write_row(out, fields);
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = 0; c < width(); ++c) fields[c] = raw(r, c);
    csv::write_row(out, fields);
  }
}

void Dataset::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(out);
  if (!out) throw IoError("write failed: " + path.string());
}

Dataset load_csv(std::istream& in, const Schema& schema) {
  std::vector<csv::Row> rows = csv::read(in);
  if (rows.empty()) throw ParseError("missing header row", 1);
  const auto& header = rows.front().fields;
  for (const std::string& h : header) {
    if (!schema.find(trim(h))) {
      throw SchemaError("unknown column '" + h + "' in header");
    }
  }
  if (header.size() != schema.width()) {
    throw SchemaError("header has " + std::to_string(header.size()) +
                      " columns, schema has " + std::to_string(schema.width()));
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) != schema.columns()[c].name) {
      throw SchemaError("header column " + std::to_string(c) + " is '" + header[c] +
                        "', schema expects '" + schema.columns()[c].name + "'");
    }
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> lines;
  cells.reserve(rows.size() - 1);
  lines.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    cells.push_back(std::move(rows[i].fields));
    lines.push_back(rows[i].line);
  }
  return Dataset::from_rows(schema, cells, lines);
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_csv(in, schema);
}

TrainTest split(const Dataset& ds, const SplitSpec& spec) {
  if (ds.empty()) throw InvalidArgument("cannot split an empty dataset");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  }
  if (ds.size() < 2) throw InvalidArgument("split needs at least 2 records");
  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(ds.size())));
  if (n_train == 0 || n_train == ds.size()) {
    throw InvalidArgument("train_fraction leaves one side of the split empty");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, "split"));
  rng.shuffle(order);
  std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {ds.subset(train), ds.subset(test)};
}

std::size_t GroupAssignment::count(Group g) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), g));
}

GroupAssignment binarize_group(const Dataset& ds, std::string_view attribute) {
  const GroupMap& map = ds.schema().group_map(attribute);
  const std::size_t col = ds.schema().index_of(attribute);
  const Encoder& enc = ds.codec().encoders[col];
  std::vector<Group> by_code(enc.size());
  std::vector<std::string> bad;
  for (std::size_t code = 0; code < enc.size(); ++code) {
    const auto p = map.is_protected(enc.values()[code]);
    if (!p) {
      bad.push_back(enc.values()[code]);
      continue;
    }
    by_code[code] = *p ? Group::kProtected : Group::kUnprotected;
  }
  if (!bad.empty()) {
    std::string msg = "group map for '" + std::string(attribute) + "' does not cover:";
    for (const auto& v : bad) msg += " '" + v + "'";
    throw GroupMapError(msg);
  }
  GroupAssignment out{std::string(attribute), {}};
  out.labels.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out.labels.push_back(by_code[static_cast<std::size_t>(ds.code(r, col))]);
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> group_skew(
    const Dataset& ds, std::string_view attribute) {
  const std::size_t col = ds.schema().index_of(attribute);
  if (ds.schema().columns()[col].kind != ColumnKind::kCategorical) {
    throw InvalidArgument("group_skew needs a categorical column, '" +
                          std::string(attribute) + "' is numeric");
  }
  const Encoder& enc = ds.codec().encoders[col];
  std::vector<std::pair<std::string, std::size_t>> counts;
  for (const auto& v : enc.values()) counts.emplace_back(v, 0);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    ++counts[static_cast<std::size_t>(ds.code(r, col))].second;
  }
  // On a subset, values absent from it are reported with count 0.
  return counts;
}

namespace {

// Shuffles `source` and returns (first `a` rows, next `b` rows).
std::pair<Dataset, Dataset> draw_two(const Dataset& source, double fa, double fb,
                                     std::uint64_t seed, const char* what) {
  if (!(fa > 0.0 && fa < 1.0) || !(fb > 0.0 && fb < 1.0)) {
    throw InvalidArgument("attack/eval fractions must lie in (0, 1)");
  }
  if (fa + fb > 1.0 + 1e-12) {
    throw InvalidArgument(std::string("attack + eval fractions exceed the ") + what);
  }
  const double n = static_cast<double>(source.size());
  const auto na = static_cast<std::size_t>(std::llround(fa * n));
  const auto nb = static_cast<std::size_t>(std::llround(fb * n));
  if (na == 0 || nb == 0 || na + nb > source.size()) {
    throw InvalidArgument(std::string("not enough records in the ") + what +
                          " for the requested attack/eval fractions");
  }
  std::vector<std::size_t> order(source.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::size_t> a(order.begin(), order.begin() + na);
  std::vector<std::size_t> b(order.begin() + na, order.begin() + na + nb);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {source.subset(a), source.subset(b)};
}

}  // namespace

AttackData sample_attack_data(const Dataset& train, const Dataset& test,
                              const SplitSpec& spec) {
  auto [am, em] = draw_two(train, spec.attack_fraction, spec.eval_fraction,
                           derive_seed(spec.seed, "members"), "training data");
  auto [an, en] = draw_two(test, spec.attack_fraction, spec.eval_fraction,
                           derive_seed(spec.seed, "nonmembers"), "testing data");
  return {std::move(am), std::move(an), std::move(em), std::move(en)};
}

}  // namespace vdaudit::data
