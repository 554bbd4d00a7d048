// Copyright 2026 The fltop Authors
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

#include "fltop/index_set.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <string>

#include "fltop/error.h"

namespace fltop {

IndexSet IndexSet::FromIndices(std::vector<std::size_t> indices,
                               std::size_t dimension) {
  std::sort(indices.begin(), indices.end());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    Require(indices[j] < dimension, ErrorCode::kIndex,
            "index " + std::to_string(indices[j]) + " out of range for n=" +
                std::to_string(dimension));
    Require(j == 0 || indices[j] != indices[j - 1], ErrorCode::kIndex,
            "duplicate index " + std::to_string(indices[j]));
  }
  return IndexSet(std::move(indices), dimension);
}

IndexSet IndexSet::All(std::size_t dimension) {
  std::vector<std::size_t> all(dimension);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return IndexSet(std::move(all), dimension);
}

IndexSet IndexSet::Empty(std::size_t dimension) { return IndexSet({}, dimension); }

double IndexSet::ratio() const {
  if (dimension_ == 0) return 0.0;
  return static_cast<double>(indices_.size()) / static_cast<double>(dimension_);
}

bool IndexSet::Contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

void WriteIndexFile(const std::filesystem::path& path, const IndexSet& set) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + path.string() + " for writing");
  for (std::size_t i : set.indices()) out << i << '\n';
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path.string());
}

IndexSet ReadIndexFile(const std::filesystem::path& path,
                       std::size_t dimension) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::size_t> indices;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    Require(ec == std::errc() && ptr == line.data() + line.size(),
            ErrorCode::kFormat,
            path.string() + ":" + std::to_string(line_no) +
                ": expected a decimal index, got '" + line + "'");
    Require(indices.empty() || value > indices.back(), ErrorCode::kFormat,
            path.string() + ":" + std::to_string(line_no) +
                ": indices must be strictly ascending");
    indices.push_back(value);
  }
  return IndexSet::FromIndices(std::move(indices), dimension);
}

}  // namespace fltop
