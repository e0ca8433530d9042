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

#ifndef VDAUDIT_CSV_HPP_
#define VDAUDIT_CSV_HPP_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace vdaudit::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the row starts
};

// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
// LF or CRLF line endings, quoted fields may span lines. Blank lines are
// skipped. Throws ParseError on an unterminated quote or on a stray quote
// inside an unquoted field.
std::vector<Row> read(std::istream& in);

// Writes one row, quoting only fields that need it.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace vdaudit::csv

#endif  // VDAUDIT_CSV_HPP_
