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

#include "vdaudit/serialize.hpp"

#include <fstream>
#include <string>

#include "vdaudit/error.hpp"

namespace vdaudit {

nlohmann::json wrap(std::string_view kind, nlohmann::json payload) {
  return {{"format_version", kFormatVersion},
          {"kind", std::string(kind)},
          {"payload", std::move(payload)}};
}

const nlohmann::json& unwrap(const nlohmann::json& doc, std::string_view kind) {
  if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("kind") ||
      !doc.contains("payload")) {
    throw ParseError("not a vdaudit document", 0);
  }
  if (doc["format_version"] != kFormatVersion) {
    throw ParseError("unsupported format_version " + doc["format_version"].dump(), 0);
  }
  if (doc["kind"] != kind) {
    throw ParseError("expected a '" + std::string(kind) + "' document, got " +
                         doc["kind"].dump(),
                     0);
  }
  return doc["payload"];
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace vdaudit
