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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "pargp/types.hpp"

namespace pargp::eval {

/// Rows of a data file: inputs, and outputs when the file has a `y` column.
struct CsvTable {
  PointList inputs;
  std::optional<Vector> outputs;
};

/// Reads a CSV whose header is x1,...,xd optionally followed by y. Point ids
/// are assigned consecutively from `first_id`.
CsvTable read_csv(std::istream& in, PointId first_id = 0, const std::string& name = "input");
CsvTable read_csv_file(const std::string& path, PointId first_id = 0);

void write_csv(std::ostream& out, const Dataset& data);

}  // namespace pargp::eval
