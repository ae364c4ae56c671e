// Copyright 2026 The Forcelab Authors
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

#ifndef FORCELAB_CSV_H_
#define FORCELAB_CSV_H_

#include <string>
#include <vector>

namespace forcelab {

// Shortest decimal text that round-trips the double.
std::string format_double(double v);

// First line of every CSV artifact: tool version and resolved-config hash.
std::string artifact_stamp(const std::string& config_hash);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string to_string(const std::string& stamp) const;
};

// Writes the table, creating parent directories. Throws std::runtime_error.
void write_csv(const std::string& path, const std::string& stamp,
               const CsvTable& table);

// Appends rows to an existing CSV (or creates it with header and stamp).
void append_csv(const std::string& path, const std::string& stamp,
                const CsvTable& table);

}  // namespace forcelab

#endif  // FORCELAB_CSV_H_
