/*
 * Copyright 2026 The casimir-workbench developers
 *
 *      Licensed under the Apache License, Version 2.0 (the "License")
 *
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *              http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "table_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <string_view>

#include <fmt/format.h>

#include "errors.hpp"

namespace casimir {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view token, double& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ',' || line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ',' && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

} // namespace

std::vector<std::vector<double>> read_table(std::istream& in, std::size_t columns,
                                            const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto fields = split(view);
    std::vector<double> row(columns);
    bool ok = fields.size() == columns;
    for (std::size_t c = 0; ok && c < columns; ++c) ok = parse_double(fields[c], row[c]);
    if (!ok) {
      if (header_allowed && rows.empty()) {
        header_allowed = false;
        continue;
      }
      throw ValidationError(
          fmt::format("{} line {}: expected {} numeric columns", what, line_no, columns));
    }
    header_allowed = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ValidationError(fmt::format("{} contains no data rows", what));
  }
  return rows;
}

std::vector<std::vector<double>> load_table_file(const std::string& path, std::size_t columns,
                                                 const std::string& what) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open {} file '{}'", what, path));
  }
  return read_table(in, columns, what);
}

} // namespace casimir
