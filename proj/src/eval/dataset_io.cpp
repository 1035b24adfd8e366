/*
 * Copyright 2026 The pargp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pargp/eval/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "pargp/errors.hpp"

namespace pargp::eval {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    std::string_view cell = line.substr(0, comma);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
      cell.remove_suffix(1);
    out.push_back(cell);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in, PointId first_id, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(name + ": empty file");
  const auto header = split(line);
  std::size_t d = 0;
  bool has_y = false;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "x" + std::to_string(j + 1)) {
      if (has_y) throw ConfigError(name + ": column y must come last");
      ++d;
    } else if (header[j] == "y" && j + 1 == header.size()) {
      has_y = true;
    } else {
      throw ConfigError(name + ": unexpected header column '" + std::string(header[j]) +
                        "' (expected x1..xd and an optional final y)");
    }
  }
  if (d == 0) throw ConfigError(name + ": header names no input columns");

  CsvTable out;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ConfigError(name + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                        " columns, expected " + std::to_string(header.size()));
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      auto [ptr, ec] = std::from_chars(cells[j].data(), cells[j].data() + cells[j].size(), values[j]);
      if (ec != std::errc() || ptr != cells[j].data() + cells[j].size() || cells[j].empty())
        throw ConfigError(name + ": line " + std::to_string(line_no) + " column " + std::to_string(j + 1) +
                          " is not a number");
    }
    InputPoint p;
    p.id = first_id + static_cast<PointId>(out.inputs.size());
    p.coords.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(d));
    out.inputs.push_back(std::move(p));
    if (has_y) ys.push_back(values.back());
  }
  if (has_y) out.outputs = Eigen::Map<const Vector>(ys.data(), static_cast<Index>(ys.size()));
  return out;
}

CsvTable read_csv_file(const std::string& path, PointId first_id) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return read_csv(in, first_id, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const std::size_t d = data.empty() ? 0 : data.inputs.front().dim();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << j + 1 << ',';
  out << "y\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double c : data.inputs[i].coords) {
      auto r = std::to_chars(buf, buf + sizeof buf, c);
      out.write(buf, r.ptr - buf) << ',';
    }
    auto r = std::to_chars(buf, buf + sizeof buf, data.outputs[static_cast<Index>(i)]);
    out.write(buf, r.ptr - buf) << '\n';
  }
}

}  // namespace pargp::eval
