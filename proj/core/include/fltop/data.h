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

#ifndef FLTOP_DATA_H_
#define FLTOP_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "fltop/dataset.h"

namespace fltop::data {

// An unsigned-byte IDX tensor: big-endian magic 0x000008NN (NN = rank),
// NN big-endian uint32 dimension sizes, then the raw bytes.
struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> bytes;
};

IdxTensor ReadIdx(const std::filesystem::path& path);
void WriteIdx(const std::filesystem::path& path, const IdxTensor& tensor);

// Images (magic 0x00000803) and labels (0x00000801). Pixels are rescaled to
// [0, 1] and each image flattened into one row. Format problems raise a
// format error that names the byte offset.
Dataset LoadIdx(const std::filesystem::path& images_path,
                const std::filesystem::path& labels_path);

struct SynthOptions {
  std::size_t samples = 1000;
  std::size_t features = 20;
  double positive_rate = 0.5;
  // Distance between the class means along the informative features.
  double separation = 3.0;
  // Number of leading features that carry class signal.
  std::size_t informative = 4;
  // Number of leading features kept dense; the rest are thresholded to {0,1}.
  std::size_t dense = 2;
  std::uint64_t seed = 0;
};

// Binary task from two Gaussian class clusters. A latent vector z ~ N(mu_y, I)
// is drawn with mu_y = +/- separation/2 on the informative coordinates; dense
// features are a fixed squashing of z into [0, 1], the remaining features are
// sparse indicators 1[z_j > 1.5].
Dataset SynthImbalanced(const SynthOptions& options);

// Seeded random split; the first element holds 1 - test_fraction of the rows.
std::pair<Dataset, Dataset> TrainTestSplit(const Dataset& d,
                                           double test_fraction,
                                           std::uint64_t seed);

enum class PartitionMode { kIid, kLabelSkewed };

PartitionMode ParsePartitionMode(std::string_view name);
std::string_view PartitionModeName(PartitionMode mode);

struct Partition {
  PartitionMode mode = PartitionMode::kIid;
  std::vector<std::vector<std::size_t>> assignments;
};

// kIid: equal-size disjoint random shards of floor(|d| / num_clients) rows.
// kLabelSkewed: each client draws from `labels_per_client` distinct labels,
// in equal shares.
Partition MakePartition(const Dataset& d, std::size_t num_clients,
                        PartitionMode mode, std::uint64_t seed,
                        std::size_t labels_per_client = 2);

std::vector<Dataset> Materialize(const Dataset& d, const Partition& p);

// Majority class subsampled uniformly down to the minority count. Rows keep
// their original relative order. Throws a data error unless both classes of a
// binary dataset are present.
Dataset Downsample(const Dataset& d, std::uint64_t seed);

// Uniform random subset of `size` rows.
Dataset PublicBatch(const Dataset& source, std::size_t size,
                    std::uint64_t seed);

}  // namespace fltop::data

#endif  // FLTOP_DATA_H_
