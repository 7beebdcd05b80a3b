// Copyright 2026 The seqlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace seqlab {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-string parse; throws ValidationError on trailing garbage.
double parse_double(std::string_view text);

/// Column-ordered numeric table with a header row, written with LF line
/// endings and shortest round-trip floats.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  /// Array of row objects using the column names as keys.
  std::string to_json() const;
  static Table from_csv(std::string_view text);
  /// Inverse of to_json; null (how JSON carries NaN) reads back as NaN.
  static Table from_json(std::string_view text);

  std::vector<double> column(std::string_view name) const;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace seqlab
