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

#include "fltop/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "fltop/error.h"
#include "fltop/random.h"

namespace fltop {

Dataset Subset(const Dataset& source, std::span<const std::size_t> rows,
               std::string name) {
  Dataset out;
  out.name = name.empty() ? source.name : std::move(name);
  out.num_classes = source.num_classes;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), source.inputs.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Require(rows[r] < source.size(), ErrorCode::kIndex, "subset row out of range");
    out.inputs.row(static_cast<Eigen::Index>(r)) =
        source.inputs.row(static_cast<Eigen::Index>(rows[r]));
    out.labels.push_back(source.labels[rows[r]]);
  }
  return out;
}

void ValidateDataset(const Dataset& d) {
  Require(static_cast<std::size_t>(d.inputs.rows()) == d.labels.size(),
          ErrorCode::kData, "input rows and label count differ");
  Require(d.num_classes >= 2, ErrorCode::kData, "need at least two classes");
  for (int label : d.labels) {
    Require(label >= 0 && label < d.num_classes, ErrorCode::kData,
            "label " + std::to_string(label) + " out of range");
  }
  Require(d.inputs.allFinite(), ErrorCode::kData, "non-finite feature value");
}

namespace data {
namespace {

std::uint32_t ReadBigEndian32(const std::vector<std::uint8_t>& b,
                              std::size_t offset) {
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

void AppendBigEndian32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

std::string FormatError(const std::filesystem::path& path, std::size_t offset,
                        const std::string& what) {
  return path.string() + " at byte offset " + std::to_string(offset) + ": " + what;
}

}  // namespace

IdxTensor ReadIdx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  const std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
  Require(raw.size() >= 4, ErrorCode::kFormat,
          FormatError(path, raw.size(), "file too short for the IDX magic"));
  Require(raw[0] == 0 && raw[1] == 0, ErrorCode::kFormat,
          FormatError(path, 0, "bad magic, expected two zero bytes"));
  Require(raw[2] == 0x08, ErrorCode::kFormat,
          FormatError(path, 2, "unsupported IDX element type, expected 0x08 (ubyte)"));
  const std::size_t rank = raw[3];
  Require(rank >= 1, ErrorCode::kFormat, FormatError(path, 3, "rank must be >= 1"));
  const std::size_t header = 4 + 4 * rank;
  Require(raw.size() >= header, ErrorCode::kFormat,
          FormatError(path, raw.size(), "truncated dimension header"));
  IdxTensor t;
  std::size_t count = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    t.dims.push_back(ReadBigEndian32(raw, 4 + 4 * d));
    count *= t.dims.back();
  }
  Require(raw.size() >= header + count, ErrorCode::kFormat,
          FormatError(path, raw.size(),
                      "truncated payload, expected " + std::to_string(count) +
                          " data bytes after the header"));
  Require(raw.size() == header + count, ErrorCode::kFormat,
          FormatError(path, header + count, "trailing bytes after payload"));
  t.bytes.assign(raw.begin() + static_cast<std::ptrdiff_t>(header), raw.end());
  return t;
}

void WriteIdx(const std::filesystem::path& path, const IdxTensor& tensor) {
  Require(!tensor.dims.empty() && tensor.dims.size() < 256,
          ErrorCode::kConfiguration, "IDX rank must lie in [1, 255]");
  std::size_t count = 1;
  for (std::uint32_t d : tensor.dims) count *= d;
  Require(count == tensor.bytes.size(), ErrorCode::kDimension,
          "IDX dims do not match the payload size");
  std::string header;
  header.push_back(0);
  header.push_back(0);
  header.push_back(0x08);
  header.push_back(static_cast<char>(tensor.dims.size()));
  for (std::uint32_t d : tensor.dims) AppendBigEndian32(header, d);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(tensor.bytes.data()),
            static_cast<std::streamsize>(tensor.bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path.string());
}

Dataset LoadIdx(const std::filesystem::path& images_path,
                const std::filesystem::path& labels_path) {
  const IdxTensor images = ReadIdx(images_path);
  const IdxTensor labels = ReadIdx(labels_path);
  Require(images.dims.size() == 3, ErrorCode::kFormat,
          FormatError(images_path, 0, "expected magic 0x00000803 (rank-3 images)"));
  Require(labels.dims.size() == 1, ErrorCode::kFormat,
          FormatError(labels_path, 0, "expected magic 0x00000801 (rank-1 labels)"));
  const std::size_t n = images.dims[0];
  Require(labels.dims[0] == n, ErrorCode::kFormat,
          FormatError(labels_path, 4,
                      "label count " + std::to_string(labels.dims[0]) +
                          " does not match image count " + std::to_string(n)));
  const std::size_t pixels = std::size_t{images.dims[1]} * images.dims[2];
  Dataset d;
  d.name = images_path.stem().string();
  d.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < pixels; ++c) {
      d.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          images.bytes[r * pixels + c] / 255.0;
    }
  }
  int max_label = 1;
  d.labels.reserve(n);
  for (std::uint8_t l : labels.bytes) {
    d.labels.push_back(l);
    max_label = std::max<int>(max_label, l);
  }
  d.num_classes = max_label + 1;
  return d;
}

Dataset SynthImbalanced(const SynthOptions& o) {
  Require(o.positive_rate > 0.0 && o.positive_rate < 1.0,
          ErrorCode::kConfiguration, "positive_rate must lie in (0, 1)");
  Require(o.samples >= 1 && o.features >= 1, ErrorCode::kConfiguration,
          "need at least one sample and one feature");
  Require(o.informative <= o.features && o.dense <= o.features,
          ErrorCode::kConfiguration, "informative/dense counts exceed features");
  Rng rng = MakeStream(o.seed, StreamTag::kData);

  // Exact class count, randomly placed.
  const auto positives = static_cast<std::size_t>(
      std::llround(o.positive_rate * static_cast<double>(o.samples)));
  std::vector<int> labels(o.samples, 0);
  std::fill_n(labels.begin(), std::min(positives, o.samples), 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  Dataset d;
  d.name = "synthetic";
  d.num_classes = 2;
  d.labels = labels;
  d.inputs.resize(static_cast<Eigen::Index>(o.samples),
                  static_cast<Eigen::Index>(o.features));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t r = 0; r < o.samples; ++r) {
    const double sign = labels[r] == 1 ? 1.0 : -1.0;
    for (std::size_t c = 0; c < o.features; ++c) {
      double z = gauss(rng);
      if (c < o.informative) z += sign * o.separation / 2.0;
      const double value = c < o.dense ? 1.0 / (1.0 + std::exp(-z))
                                       : (z > 1.5 ? 1.0 : 0.0);
      d.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
    }
  }
  return d;
}

std::pair<Dataset, Dataset> TrainTestSplit(const Dataset& d,
                                           double test_fraction,
                                           std::uint64_t seed) {
  Require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::kConfiguration,
          "test fraction must lie in (0, 1)");
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = MakeStream(seed, StreamTag::kSplit);
  std::shuffle(order.begin(), order.end(), rng);
  const auto test_size = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(d.size())));
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_size));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(test_size), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {Subset(d, train, d.name + "-train"), Subset(d, test, d.name + "-test")};
}

PartitionMode ParsePartitionMode(std::string_view name) {
  if (name == "iid") return PartitionMode::kIid;
  if (name == "label_skewed") return PartitionMode::kLabelSkewed;
  throw Error(ErrorCode::kConfiguration,
              "unknown partition mode '" + std::string(name) +
                  "' (expected iid or label_skewed)");
}

std::string_view PartitionModeName(PartitionMode mode) {
  return mode == PartitionMode::kIid ? "iid" : "label_skewed";
}

Partition MakePartition(const Dataset& d, std::size_t num_clients,
                        PartitionMode mode, std::uint64_t seed,
                        std::size_t labels_per_client) {
  Require(num_clients >= 1, ErrorCode::kConfiguration, "need at least one client");
  Require(num_clients <= d.size(), ErrorCode::kConfiguration,
          "cannot split " + std::to_string(d.size()) + " rows over " +
              std::to_string(num_clients) + " clients");
  Rng rng = MakeStream(seed, StreamTag::kPartition);
  Partition p;
  p.mode = mode;
  p.assignments.resize(num_clients);
  const std::size_t shard = d.size() / num_clients;

  if (mode == PartitionMode::kIid) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t c = 0; c < num_clients; ++c) {
      p.assignments[c].assign(order.begin() + static_cast<std::ptrdiff_t>(c * shard),
                              order.begin() + static_cast<std::ptrdiff_t>((c + 1) * shard));
    }
    return p;
  }

  // Label-skewed: walk a shuffled cycle of the present labels so that client c
  // owns labels cycle[c*L .. c*L + L) (mod the number of labels).
  std::map<int, std::vector<std::size_t>> pools;
  for (std::size_t r = 0; r < d.size(); ++r) pools[d.labels[r]].push_back(r);
  std::vector<int> cycle;
  for (auto& [label, rows] : pools) {
    std::shuffle(rows.begin(), rows.end(), rng);
    cycle.push_back(label);
  }
  std::shuffle(cycle.begin(), cycle.end(), rng);
  const std::size_t per_client = std::clamp<std::size_t>(labels_per_client, 1, cycle.size());

  std::vector<std::vector<int>> owned(num_clients);
  std::map<int, std::size_t> demand;
  for (std::size_t c = 0; c < num_clients; ++c) {
    for (std::size_t j = 0; j < per_client; ++j) {
      const int label = cycle[(c * per_client + j) % cycle.size()];
      owned[c].push_back(label);
      ++demand[label];
    }
  }
  // Equal share per (client, label), limited by the scarcest label.
  std::size_t share = shard / per_client;
  for (const auto& [label, count] : demand) {
    share = std::min(share, pools[label].size() / count);
  }
  Require(share >= 1, ErrorCode::kConfiguration,
          "not enough rows per label for a label-skewed split");
  std::map<int, std::size_t> cursor;
  for (std::size_t c = 0; c < num_clients; ++c) {
    for (int label : owned[c]) {
      const auto& pool = pools[label];
      std::size_t& at = cursor[label];
      p.assignments[c].insert(p.assignments[c].end(),
                              pool.begin() + static_cast<std::ptrdiff_t>(at),
                              pool.begin() + static_cast<std::ptrdiff_t>(at + share));
      at += share;
    }
  }
  return p;
}

std::vector<Dataset> Materialize(const Dataset& d, const Partition& p) {
  std::vector<Dataset> out;
  out.reserve(p.assignments.size());
  for (std::size_t c = 0; c < p.assignments.size(); ++c) {
    out.push_back(Subset(d, p.assignments[c], d.name + "-client" + std::to_string(c)));
  }
  return out;
}

Dataset Downsample(const Dataset& d, std::uint64_t seed) {
  Require(d.num_classes == 2, ErrorCode::kData, "downsampling needs binary labels");
  std::vector<std::size_t> pos, neg;
  for (std::size_t r = 0; r < d.size(); ++r) (d.labels[r] == 1 ? pos : neg).push_back(r);
  Require(!pos.empty() && !neg.empty(), ErrorCode::kData,
          "downsampling needs both classes present");
  std::vector<std::size_t>& minority = pos.size() <= neg.size() ? pos : neg;
  std::vector<std::size_t>& majority = pos.size() <= neg.size() ? neg : pos;
  Rng rng = MakeStream(seed, StreamTag::kDownsample);
  std::vector<std::size_t> kept;
  std::sample(majority.begin(), majority.end(), std::back_inserter(kept),
              static_cast<std::ptrdiff_t>(minority.size()), rng);
  kept.insert(kept.end(), minority.begin(), minority.end());
  std::sort(kept.begin(), kept.end());
  return Subset(d, kept);
}

Dataset PublicBatch(const Dataset& source, std::size_t size,
                    std::uint64_t seed) {
  Require(size >= 1 && size <= source.size(), ErrorCode::kConfiguration,
          "public batch size " + std::to_string(size) + " exceeds source of " +
              std::to_string(source.size()));
  Rng rng = MakeStream(seed, StreamTag::kPublic);
  const std::vector<std::size_t> rows = SampleIndices(source.size(), size, rng);
  return Subset(source, rows, source.name + "-public");
}

}  // namespace data
}  // namespace fltop
