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

#ifndef FLTOP_TOOLS_EXPERIMENT_CONFIG_H_
#define FLTOP_TOOLS_EXPERIMENT_CONFIG_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fltop/data.h"
#include "fltop/federation.h"
#include "fltop/nn.h"

namespace fltop::cli {

// Malformed or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyntheticSource {
  data::SynthOptions options;
  double test_fraction = 0.2;
};

struct IdxSource {
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  // Optional separate public pool (for example MNIST next to Fashion-MNIST).
  std::optional<std::filesystem::path> public_images;
  std::optional<std::filesystem::path> public_labels;
};

struct DatasetConfig {
  std::variant<SyntheticSource, IdxSource> source;
  data::PartitionMode partition = data::PartitionMode::kIid;
  std::size_t labels_per_client = 2;
  bool downsample = false;
  std::size_t public_size = 100;
};

struct ModelConfig {
  std::vector<std::size_t> hidden = {16};
  nn::Activation activation = nn::Activation::kRelu;
};

struct ExperimentConfig {
  std::string scheme = "fl-top";
  std::filesystem::path output_dir = "fltop_out";
  DatasetConfig dataset;
  ModelConfig model;
  FederationConfig federation;
  std::optional<std::filesystem::path> index_file;
};

// Strict parse: unknown keys, wrong types and invalid values raise
// ConfigError. Relative paths resolve against `base_dir`.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Every field, defaults included, so the run can be repeated from it alone.
nlohmann::json ResolvedConfigJson(const ExperimentConfig& config);

nn::ArchSpec BuildArch(const ExperimentConfig& config, std::size_t features,
                       int num_classes);

// Loads, splits, partitions and extracts the public batch.
FederationData LoadFederationData(const ExperimentConfig& config);

// Rough multiply-add count of the local training of a whole run.
double EstimatedWork(const ExperimentConfig& config, std::size_t parameters);

inline constexpr double kDeskScaleWork = 5e10;

}  // namespace fltop::cli

#endif  // FLTOP_TOOLS_EXPERIMENT_CONFIG_H_
