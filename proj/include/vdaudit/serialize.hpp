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

// Versioned JSON container shared by every cached pipeline artifact:
//   {"format_version": 1, "kind": "<kind>", "payload": {...}}

#ifndef VDAUDIT_SERIALIZE_HPP_
#define VDAUDIT_SERIALIZE_HPP_

#include <filesystem>
#include <string_view>

#include "json.hpp"

namespace vdaudit {

inline constexpr int kFormatVersion = 1;

nlohmann::json wrap(std::string_view kind, nlohmann::json payload);

// Returns the payload; throws ParseError on a kind or version mismatch.
const nlohmann::json& unwrap(const nlohmann::json& doc, std::string_view kind);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace vdaudit

#endif  // VDAUDIT_SERIALIZE_HPP_
