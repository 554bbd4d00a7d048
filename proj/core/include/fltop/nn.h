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

#ifndef FLTOP_NN_H_
#define FLTOP_NN_H_

// Dense feed-forward networks over a flat parameter vector, with plain SGD
// and SGD restricted to a fixed coordinate subset.
//
// Parameter layout: for each layer in order, the weight matrix row-major
// (output_width x input_width) followed by the bias vector (output_width).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fltop/dataset.h"
#include "fltop/index_set.h"

namespace fltop::nn {

enum class Activation { kIdentity, kRelu, kSigmoid, kSoftmax };
enum class Loss { kCrossEntropy, kBinaryCrossEntropy };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

struct Layer {
  std::size_t input_width = 0;
  std::size_t output_width = 0;
  Activation activation = Activation::kRelu;
};

class ArchSpec {
 public:
  // Validates layer chaining and the output/loss pairing: softmax only on the
  // last layer with cross-entropy, a sigmoid last layer with binary
  // cross-entropy. Throws a configuration error otherwise.
  static ArchSpec Create(std::vector<Layer> layers, Loss loss);

  // input -> hidden... -> output. A single output unit gets sigmoid/BCE,
  // several get softmax/cross-entropy.
  static ArchSpec Mlp(std::size_t input_width,
                      std::span<const std::size_t> hidden_widths,
                      std::size_t output_width,
                      Activation hidden_activation = Activation::kRelu);

  const std::vector<Layer>& layers() const { return layers_; }
  Loss loss() const { return loss_; }
  std::size_t input_width() const { return layers_.front().input_width; }
  std::size_t output_width() const { return layers_.back().output_width; }
  std::size_t parameter_count() const { return parameter_count_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] +
           layers_[layer].input_width * layers_[layer].output_width;
  }

 private:
  ArchSpec(std::vector<Layer> layers, Loss loss);

  std::vector<Layer> layers_;
  Loss loss_ = Loss::kCrossEntropy;
  std::vector<std::size_t> offsets_;
  std::size_t parameter_count_ = 0;
};

struct Batch {
  Matrix inputs;   // batch_size x input_width
  Matrix targets;  // batch_size x output_width; one-hot or {0,1}
};

// Targets for `rows` of `data`: the label itself for one sigmoid output, a
// one-hot row otherwise.
Batch MakeBatch(const ArchSpec& arch, const Dataset& data,
                std::span<const std::size_t> rows);
Batch MakeBatch(const ArchSpec& arch, const Dataset& data);

// Glorot-uniform weights, zero biases.
Vector InitModel(const ArchSpec& arch, std::uint64_t seed);

struct ForwardResult {
  double loss = 0.0;      // mean over the batch
  Matrix predictions;     // probabilities, batch_size x output_width
};

ForwardResult ForwardLoss(const ArchSpec& arch, std::span<const double> w,
                          const Batch& batch);

// Predictions only; no targets required.
Matrix Predict(const ArchSpec& arch, std::span<const double> w,
               const Matrix& inputs);

// Gradient of the mean batch loss with respect to every parameter.
Vector Gradient(const ArchSpec& arch, std::span<const double> w,
                const Batch& batch);

struct SgdOptions {
  int steps = 1;                // T_gd
  double learning_rate = 0.1;   // eta
  std::size_t batch_size = 10;  // clamped to the dataset size
};

// Batches are drawn without replacement from a seeded permutation; the
// permutation is redrawn once fewer than batch_size rows remain.
class BatchSampler {
 public:
  BatchSampler(std::size_t dataset_size, std::size_t batch_size,
               std::uint64_t seed);
  std::span<const std::size_t> Next();

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_size_;
  std::size_t cursor_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
};

// `steps` plain SGD updates w <- w - eta * grad.
Vector Sgd(const ArchSpec& arch, const Dataset& data, Vector w,
           const SgdOptions& options, std::uint64_t seed);

// SGD where only coordinates in `retained` move. Every other coordinate must
// equal `frozen` on entry and keeps that exact value throughout. With
// retained == all coordinates this is bit-identical to Sgd.
Vector TopKSgd(const ArchSpec& arch, const Dataset& data, Vector w,
               std::span<const double> frozen, const IndexSet& retained,
               const SgdOptions& options, std::uint64_t seed);

}  // namespace fltop::nn

#endif  // FLTOP_NN_H_
