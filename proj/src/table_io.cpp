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

#include "seqlab/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "seqlab/errors.hpp"

namespace seqlab {

std::string format_double(double value) {
  char buf[64];
  // Counts and other whole numbers read better without an exponent.
  const bool whole = std::abs(value) < 1e15 && value == std::trunc(value);
  auto [ptr, ec] = whole ? std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw ValidationError("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  // nlohmann serializes doubles with the shortest round-trip representation.
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Table Table::from_csv(std::string_view text) {
  Table table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (table.columns.empty()) {
      for (auto f : fields) table.columns.emplace_back(trim(f));
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw ValidationError("CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.columns.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      try {
        row.push_back(parse_double(trim(f)));
      } catch (const ValidationError& e) {
        throw ValidationError("CSV line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw ValidationError("CSV input has no header");
  return table;
}

Table Table::from_json(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("JSON input: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("JSON input must be an array of row objects");
  Table table;
  for (const auto& obj : doc) {
    if (!obj.is_object()) throw ValidationError("JSON input must be an array of row objects");
    if (table.columns.empty() && table.rows.empty()) {
      for (const auto& item : obj.items()) table.columns.push_back(item.key());
    }
    if (obj.size() != table.columns.size()) throw ValidationError("JSON rows have differing fields");
    std::vector<double> row;
    for (const auto& name : table.columns) {
      const auto it = obj.find(name);
      if (it == obj.end()) throw ValidationError("JSON row is missing '" + name + "'");
      if (it->is_null()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else if (it->is_number()) {
        row.push_back(it->get<double>());
      } else {
        throw ValidationError("JSON field '" + name + "' is not a number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw ValidationError("missing column '" + std::string(name) + "'");
  }
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ValidationError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ValidationError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace seqlab
