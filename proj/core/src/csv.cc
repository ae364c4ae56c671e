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

#include "forcelab/csv.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forcelab {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string artifact_stamp(const std::string& config_hash) {
  return std::string("# forcelab ") + FORCELAB_VERSION +
         " config_hash=" + config_hash;
}

std::string CsvTable::to_string(const std::string& stamp) const {
  std::ostringstream os;
  if (!stamp.empty()) os << stamp << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << (i ? "," : "") << header[i];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << row[i];
    }
    os << '\n';
  }
  return os.str();
}

namespace {

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

void write_csv(const std::string& path, const std::string& stamp,
               const CsvTable& table) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << table.to_string(stamp);
}

void append_csv(const std::string& path, const std::string& stamp,
                const CsvTable& table) {
  if (!std::filesystem::exists(path)) {
    write_csv(path, stamp, table);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path);
  CsvTable body;
  body.rows = table.rows;
  std::string text = body.to_string("");
  // Drop the empty header line produced for a header-less table.
  out << text.substr(text.find('\n') + 1);
}

}  // namespace forcelab
