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

#include "vdaudit/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "vdaudit/error.hpp"

namespace vdaudit::config {
namespace {

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  std::string key() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    std::string k(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '=' after '" + k + "'");
    ++pos_;
    return k;
  }

  nlohmann::json value(bool allow_list = true) {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return quoted();
    if (c == '[') {
      if (!allow_list) fail("nested lists are not supported");
      return list();
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           text_[pos_] != '#' && text_[pos_] != ' ' && text_[pos_] != '\t') {
      ++pos_;
    }
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "true") return true;
    if (word == "false") return false;
    if (word == "none") return nullptr;
    return number(word);
  }

 private:
  nlohmann::json quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        ++pos_;
        if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\\')) {
          fail("unsupported escape in string");
        }
      }
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json list() {
    ++pos_;
    nlohmann::json items = nlohmann::json::array();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return items;
    }
    while (true) {
      items.push_back(value(false));
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated list");
      if (text_[pos_] == ']') {
        ++pos_;
        return items;
      }
      if (text_[pos_] != ',') fail("expected ',' or ']' in list");
      ++pos_;
    }
  }

  nlohmann::json number(std::string_view word) {
    if (word.empty()) fail("missing value");
    const char* first = word.data();
    const char* last = word.data() + word.size();
    if (word.find_first_of(".eE") == std::string_view::npos) {
      long long v = 0;
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && p == last) return v;
    }
    double d = 0.0;
    const auto [p, ec] = std::from_chars(first, last, d);
    if (ec != std::errc() || p != last) fail("cannot read '" + std::string(word) + "'");
    return d;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

[[noreturn]] void bad_type(std::string_view key, std::string_view wanted) {
  throw ConfigError("config key '" + std::string(key) + "' expects " + std::string(wanted));
}

std::string as_string(std::string_view key, const nlohmann::json& v) {
  if (!v.is_string()) bad_type(key, "a string");
  return v.get<std::string>();
}

double as_number(std::string_view key, const nlohmann::json& v) {
  if (!v.is_number()) bad_type(key, "a number");
  return v.get<double>();
}

long long as_integer(std::string_view key, const nlohmann::json& v) {
  if (!v.is_number_integer()) bad_type(key, "an integer");
  return v.get<long long>();
}

bool as_bool(std::string_view key, const nlohmann::json& v) {
  if (!v.is_boolean()) bad_type(key, "true or false");
  return v.get<bool>();
}

std::vector<double> as_list(std::string_view key, const nlohmann::json& v) {
  if (v.is_null()) return {};
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) bad_type(key, "a number list or none");
  std::vector<double> out;
  for (const auto& item : v) out.push_back(as_number(key, item));
  return out;
}

std::filesystem::path as_path(std::string_view key, const nlohmann::json& v,
                              const std::filesystem::path& base) {
  std::filesystem::path p = as_string(key, v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.empty()) throw ConfigError("dataset path is required");
  if (schema.empty()) throw ConfigError("schema path is required");
  if (protected_attribute.empty()) throw ConfigError("protected attribute is required");
  if (depth < 0) throw ConfigError("depth must be >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (const double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilon values must be finite and > 0");
  }
  for (const double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("fairpick_t values must lie in [0, 1]");
  }
  if (fairpick && thresholds.empty()) throw ConfigError("fairpick is enabled with no thresholds");
  if (min_per_cluster < 1) throw ConfigError("min_per_cluster must be >= 1");
  if (refine_passes < 0) throw ConfigError("refine_passes must be >= 0");
  const auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_unit(train_fraction)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (!in_unit(attack_fraction) || !in_unit(eval_fraction) ||
      attack_fraction + eval_fraction > 1.0) {
    throw ConfigError("attack_fraction and eval_fraction must be positive and sum to <= 1");
  }
  if (attack.hidden < 1 || attack.epochs < 1 || attack.batch_size < 1 ||
      !(attack.learning_rate > 0.0)) {
    throw ConfigError("attack MLP settings must be positive");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"dataset", dataset.generic_string()},
          {"schema", schema.generic_string()},
          {"protected", protected_attribute},
          {"depth", depth},
          {"epsilon", epsilons},
          {"fairpick", fairpick},
          {"fairpick_t", thresholds},
          {"min_per_cluster", min_per_cluster},
          {"refine_passes", refine_passes},
          {"trials", trials},
          {"train_fraction", train_fraction},
          {"attack_fraction", attack_fraction},
          {"eval_fraction", eval_fraction},
          {"seed", seed},
          {"attack", mlp::to_json(attack)}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.dataset = j.at("dataset").get<std::string>();
  c.schema = j.at("schema").get<std::string>();
  c.protected_attribute = j.at("protected").get<std::string>();
  c.depth = j.at("depth").get<int>();
  c.epsilons = j.at("epsilon").get<std::vector<double>>();
  c.fairpick = j.at("fairpick").get<bool>();
  c.thresholds = j.at("fairpick_t").get<std::vector<double>>();
  c.min_per_cluster = j.at("min_per_cluster").get<std::size_t>();
  c.refine_passes = j.at("refine_passes").get<int>();
  c.trials = j.at("trials").get<int>();
  c.train_fraction = j.at("train_fraction").get<double>();
  c.attack_fraction = j.at("attack_fraction").get<double>();
  c.eval_fraction = j.at("eval_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.attack = mlp::hyper_from_json(j.at("attack"));
  return c;
}

nlohmann::json parse_document(std::istream& in) {
  nlohmann::json doc = nlohmann::json::object();
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    LineParser p(text, line);
    if (p.at_end()) continue;
    const std::string key = p.key();
    nlohmann::json v = p.value();
    if (!p.at_end()) p.fail("unexpected text after the value of '" + key + "'");
    if (doc.contains(key)) p.fail("duplicate key '" + key + "'");
    doc[key] = std::move(v);
  }
  return doc;
}

void apply_key(ExperimentConfig& cfg, std::string_view key, const nlohmann::json& v,
               const std::filesystem::path& base) {
  const auto non_negative = [&](long long x) {
    if (x < 0) bad_type(key, "a non-negative integer");
    return x;
  };
  if (key == "dataset") {
    cfg.dataset = as_path(key, v, base);
  } else if (key == "schema") {
    cfg.schema = as_path(key, v, base);
  } else if (key == "out") {
    cfg.out = as_path(key, v, base);
  } else if (key == "protected") {
    cfg.protected_attribute = as_string(key, v);
  } else if (key == "depth") {
    cfg.depth = static_cast<int>(as_integer(key, v));
  } else if (key == "epsilon") {
    cfg.epsilons = as_list(key, v);
  } else if (key == "fairpick") {
    cfg.fairpick = as_bool(key, v);
  } else if (key == "fairpick_t") {
    cfg.thresholds = as_list(key, v);
    if (cfg.thresholds.empty()) cfg.fairpick = false;
  } else if (key == "min_per_cluster") {
    cfg.min_per_cluster = static_cast<std::size_t>(non_negative(as_integer(key, v)));
  } else if (key == "refine_passes") {
    cfg.refine_passes = static_cast<int>(as_integer(key, v));
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(as_integer(key, v));
  } else if (key == "train_fraction") {
    cfg.train_fraction = as_number(key, v);
  } else if (key == "attack_fraction") {
    cfg.attack_fraction = as_number(key, v);
  } else if (key == "eval_fraction") {
    cfg.eval_fraction = as_number(key, v);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(non_negative(as_integer(key, v)));
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(as_integer(key, v));
  } else if (key == "attack_hidden") {
    cfg.attack.hidden = static_cast<std::size_t>(non_negative(as_integer(key, v)));
  } else if (key == "attack_epochs") {
    cfg.attack.epochs = static_cast<int>(as_integer(key, v));
  } else if (key == "attack_learning_rate") {
    cfg.attack.learning_rate = as_number(key, v);
  } else if (key == "attack_batch_size") {
    cfg.attack.batch_size = static_cast<std::size_t>(non_negative(as_integer(key, v)));
  } else if (key == "attack_full_batch") {
    cfg.attack.full_batch = as_bool(key, v);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base) {
  const nlohmann::json doc = parse_document(in);
  ExperimentConfig cfg;
  // The flag goes first so that `fairpick_t = none` always disables FairPick.
  if (doc.contains("fairpick")) apply_key(cfg, "fairpick", doc.at("fairpick"), base);
  for (const auto& [key, value] : doc.items()) {
    if (key != "fairpick") apply_key(cfg, key, value, base);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

std::vector<double> parse_number_list(std::string_view text) {
  std::string s(text);
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) throw ConfigError("empty list");
  s = s.substr(first);
  if (s == "none") return {};
  if (s.front() != '[') s = "[" + s + "]";
  LineParser p(s, 0);
  const nlohmann::json v = p.value();
  if (!p.at_end()) p.fail("unexpected text after the list");
  return as_list("list", v);
}

}  // namespace vdaudit::config
