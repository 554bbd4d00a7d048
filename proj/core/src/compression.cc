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

#include "fltop/compression.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fltop/error.h"
#include "fltop/random.h"

namespace fltop {
namespace {

void CheckK(std::size_t k, std::size_t n) {
  Require(k <= n, ErrorCode::kConfiguration,
          "K=" + std::to_string(k) + " exceeds the parameter count n=" +
              std::to_string(n));
}

}  // namespace

CompressedUpdate Compress(std::span<const double> v, const IndexSet& set) {
  Require(v.size() == set.dimension(), ErrorCode::kDimension,
          "vector length " + std::to_string(v.size()) +
              " does not match index set dimension " +
              std::to_string(set.dimension()));
  CompressedUpdate c;
  c.values.reserve(set.size());
  for (std::size_t i : set.indices()) c.values.push_back(v[i]);
  return c;
}

Vector Expand(const CompressedUpdate& c, const IndexSet& set,
              std::span<const double> base) {
  Require(base.size() == set.dimension(), ErrorCode::kDimension,
          "base length does not match index set dimension");
  Require(c.size() == set.size(), ErrorCode::kDimension,
          "compressed update has " + std::to_string(c.size()) +
              " values for " + std::to_string(set.size()) + " indices");
  Vector out(base.begin(), base.end());
  const auto idx = set.indices();
  for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = c.values[j];
  return out;
}

IndexSet LargestK(std::span<const double> scores, std::size_t k) {
  const std::size_t n = scores.size();
  CheckK(k, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [&scores](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                   order.end(), better);
  order.resize(k);
  return IndexSet::FromIndices(std::move(order), n);
}

IndexSet SelectTopK(const nn::ArchSpec& arch, std::span<const double> w0,
                    const nn::Batch& public_batch, int init_steps,
                    std::size_t k, double learning_rate) {
  const std::size_t n = arch.parameter_count();
  CheckK(k, n);
  Require(init_steps >= 1, ErrorCode::kConfiguration,
          "Top-K selection needs at least one SGD step");
  Require(w0.size() == n, ErrorCode::kDimension, "w0 length mismatch");
  if (k == n) return IndexSet::All(n);

  Vector w(w0.begin(), w0.end());
  std::vector<double> accumulated(n, 0.0);
  for (int step = 0; step < init_steps; ++step) {
    const Vector g = nn::Gradient(arch, w, public_batch);
    for (std::size_t i = 0; i < n; ++i) {
      accumulated[i] += std::abs(g[i]);
      w[i] += -(learning_rate * g[i]);
    }
  }
  return LargestK(accumulated, k);
}

IndexSet SelectRandom(std::size_t n, std::size_t k, std::uint64_t seed) {
  CheckK(k, n);
  if (k == n) return IndexSet::All(n);
  Rng rng = MakeStream(seed, StreamTag::kRoundIndexSet);
  return IndexSet::FromIndices(SampleIndices(n, k, rng), n);
}

CompressedUpdate LocalUpdate(const nn::ArchSpec& arch, const Dataset& data,
                             std::span<const double> start, const IndexSet& set,
                             bool reinit_nonselected,
                             const nn::SgdOptions& options, std::uint64_t seed) {
  Vector begin(start.begin(), start.end());
  const Vector trained =
      reinit_nonselected
          ? nn::TopKSgd(arch, data, begin, start, set, options, seed)
          : nn::Sgd(arch, data, begin, options, seed);
  CompressedUpdate update;
  update.values.reserve(set.size());
  for (std::size_t i : set.indices()) update.values.push_back(trained[i] - start[i]);
  return update;
}

std::size_t RetainedCount(double ratio, std::size_t n) {
  Require(ratio > 0.0 && ratio <= 1.0, ErrorCode::kConfiguration,
          "compression ratio must lie in (0, 1]");
  const auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

}  // namespace fltop
