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

#ifndef FLTOP_COMPRESSION_H_
#define FLTOP_COMPRESSION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fltop/dataset.h"
#include "fltop/index_set.h"
#include "fltop/nn.h"

namespace fltop {

// Values of a vector at the coordinates of an IndexSet, in index order.
struct CompressedUpdate {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const CompressedUpdate&, const CompressedUpdate&) = default;
};

// values[j] = v[set.indices()[j]].
CompressedUpdate Compress(std::span<const double> v, const IndexSet& set);

// out[set[j]] = c[j]; base elsewhere.
Vector Expand(const CompressedUpdate& c, const IndexSet& set,
              std::span<const double> base);

// Runs `init_steps` SGD steps from w0 on the whole public batch, summing
// |gradient| per coordinate at every step, and keeps the k coordinates with
// the largest total. Ties go to the lower index.
IndexSet SelectTopK(const nn::ArchSpec& arch, std::span<const double> w0,
                    const nn::Batch& public_batch, int init_steps,
                    std::size_t k, double learning_rate);

// The k coordinates with the largest `scores`, ties to the lower index.
IndexSet LargestK(std::span<const double> scores, std::size_t k);

// Uniform random k-subset of [0, n).
IndexSet SelectRandom(std::size_t n, std::size_t k, std::uint64_t seed);

// One client's local round under a coordinate mask. Starting from `start`,
// runs TopKSgd pinned to `start` outside `set` (reinit_nonselected) or plain
// Sgd (otherwise), and returns the change at the coordinates of `set`.
CompressedUpdate LocalUpdate(const nn::ArchSpec& arch, const Dataset& data,
                             std::span<const double> start, const IndexSet& set,
                             bool reinit_nonselected,
                             const nn::SgdOptions& options, std::uint64_t seed);

// K = round(ratio * n), at least 1.
std::size_t RetainedCount(double ratio, std::size_t n);

}  // namespace fltop

#endif  // FLTOP_COMPRESSION_H_
