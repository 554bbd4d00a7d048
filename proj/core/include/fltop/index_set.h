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

#ifndef FLTOP_INDEX_SET_H_
#define FLTOP_INDEX_SET_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace fltop {

// Strictly increasing set of retained coordinates out of a parameter vector of
// length `dimension()`.
class IndexSet {
 public:
  IndexSet() = default;

  // Sorts and validates. Throws an index error on duplicates or indices >= n.
  static IndexSet FromIndices(std::vector<std::size_t> indices,
                              std::size_t dimension);
  static IndexSet All(std::size_t dimension);
  static IndexSet Empty(std::size_t dimension);

  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t dimension() const { return dimension_; }
  bool empty() const { return indices_.empty(); }
  bool is_all() const { return indices_.size() == dimension_; }
  double ratio() const;
  bool Contains(std::size_t index) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  IndexSet(std::vector<std::size_t> indices, std::size_t dimension)
      : indices_(std::move(indices)), dimension_(dimension) {}

  std::vector<std::size_t> indices_;
  std::size_t dimension_ = 0;
};

// Newline-delimited ascending decimal indices, one per line.
void WriteIndexFile(const std::filesystem::path& path, const IndexSet& set);
IndexSet ReadIndexFile(const std::filesystem::path& path,
                       std::size_t dimension);

}  // namespace fltop

#endif  // FLTOP_INDEX_SET_H_
