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

#ifndef FLTOP_DATASET_H_
#define FLTOP_DATASET_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fltop {

// Row-major so that one sample is one contiguous row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Flat parameter or update vector.
using Vector = std::vector<double>;

// Labelled samples. Labels are class indices in [0, num_classes); a binary
// task has num_classes == 2.
struct Dataset {
  std::string name;
  Matrix inputs;
  std::vector<int> labels;
  int num_classes = 2;

  std::size_t size() const { return labels.size(); }
  std::size_t feature_count() const {
    return static_cast<std::size_t>(inputs.cols());
  }
};

// Rows `rows` of `source`, in the given order.
Dataset Subset(const Dataset& source, std::span<const std::size_t> rows,
               std::string name = {});

// Throws a data error unless rows/labels agree, labels are in range and every
// feature is finite.
void ValidateDataset(const Dataset& d);

}  // namespace fltop

#endif  // FLTOP_DATASET_H_
