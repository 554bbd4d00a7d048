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

#include "fltop/nn.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fltop/error.h"
#include "fltop/random.h"

namespace fltop::nn {
namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXd>;
using MatrixMap = Eigen::Map<Matrix>;
using RowVectorMap = Eigen::Map<Eigen::RowVectorXd>;

void CheckWeights(const ArchSpec& arch, std::span<const double> w) {
  Require(w.size() == arch.parameter_count(), ErrorCode::kDimension,
          "weight vector has length " + std::to_string(w.size()) +
              ", architecture needs " + std::to_string(arch.parameter_count()));
}

void CheckInputs(const ArchSpec& arch, const Matrix& inputs) {
  Require(inputs.rows() >= 1, ErrorCode::kDimension, "empty batch");
  Require(static_cast<std::size_t>(inputs.cols()) == arch.input_width(),
          ErrorCode::kDimension,
          "batch has " + std::to_string(inputs.cols()) +
              " features, architecture expects " +
              std::to_string(arch.input_width()));
}

ConstMatrixMap LayerWeights(const ArchSpec& arch, std::span<const double> w,
                            std::size_t l) {
  const Layer& layer = arch.layers()[l];
  return ConstMatrixMap(w.data() + arch.weight_offset(l),
                        static_cast<Eigen::Index>(layer.output_width),
                        static_cast<Eigen::Index>(layer.input_width));
}

ConstVectorMap LayerBias(const ArchSpec& arch, std::span<const double> w,
                         std::size_t l) {
  return ConstVectorMap(w.data() + arch.bias_offset(l),
                        static_cast<Eigen::Index>(arch.layers()[l].output_width));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void ApplyActivation(Activation a, Matrix& m) {
  switch (a) {
    case Activation::kIdentity:
      return;
    case Activation::kRelu:
      m = m.cwiseMax(0.0);
      return;
    case Activation::kSigmoid:
      m = m.unaryExpr([](double z) { return Sigmoid(z); });
      return;
    case Activation::kSoftmax:
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double mx = m.row(r).maxCoeff();
        m.row(r) = (m.row(r).array() - mx).exp().matrix();
        m.row(r) /= m.row(r).sum();
      }
      return;
  }
}

// Pre-activations and activations for every layer; activations[0] is the
// input.
struct Trace {
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
};

Trace Forward(const ArchSpec& arch, std::span<const double> w,
              const Matrix& inputs) {
  Trace t;
  const std::size_t depth = arch.layers().size();
  t.pre.reserve(depth);
  t.act.reserve(depth + 1);
  t.act.push_back(inputs);
  for (std::size_t l = 0; l < depth; ++l) {
    Matrix z = t.act.back() * LayerWeights(arch, w, l).transpose();
    z.rowwise() += LayerBias(arch, w, l);
    t.pre.push_back(z);
    ApplyActivation(arch.layers()[l].activation, z);
    t.act.push_back(std::move(z));
  }
  return t;
}

double MeanLoss(const ArchSpec& arch, const Matrix& logits,
                const Matrix& targets) {
  const Eigen::Index rows = logits.rows();
  double total = 0.0;
  if (arch.loss() == Loss::kCrossEntropy) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double mx = logits.row(r).maxCoeff();
      const double lse =
          mx + std::log((logits.row(r).array() - mx).exp().sum());
      total -= (targets.row(r).array() * (logits.row(r).array() - lse)).sum();
    }
  } else {
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const double z = logits(r, c);
        total += Softplus(z) - targets(r, c) * z;
      }
    }
  }
  return total / static_cast<double>(rows);
}

void CheckTargets(const ArchSpec& arch, const Batch& b) {
  Require(b.targets.rows() == b.inputs.rows() &&
              static_cast<std::size_t>(b.targets.cols()) == arch.output_width(),
          ErrorCode::kDimension, "target matrix shape does not match batch");
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kSoftmax:
      return "softmax";
  }
  return "?";
}

Activation ParseActivation(std::string_view name) {
  for (Activation a : {Activation::kIdentity, Activation::kRelu,
                       Activation::kSigmoid, Activation::kSoftmax}) {
    if (ActivationName(a) == name) return a;
  }
  throw Error(ErrorCode::kConfiguration,
              "unknown activation '" + std::string(name) + "'");
}

ArchSpec::ArchSpec(std::vector<Layer> layers, Loss loss)
    : layers_(std::move(layers)), loss_(loss) {
  offsets_.reserve(layers_.size());
  for (const Layer& l : layers_) {
    offsets_.push_back(parameter_count_);
    parameter_count_ += l.input_width * l.output_width + l.output_width;
  }
}

ArchSpec ArchSpec::Create(std::vector<Layer> layers, Loss loss) {
  Require(!layers.empty(), ErrorCode::kConfiguration, "architecture has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Require(layers[i].input_width > 0 && layers[i].output_width > 0,
            ErrorCode::kConfiguration, "layer widths must be positive");
    if (i + 1 < layers.size()) {
      Require(layers[i].output_width == layers[i + 1].input_width,
              ErrorCode::kConfiguration,
              "layer " + std::to_string(i) + " output width does not chain into layer " +
                  std::to_string(i + 1));
      Require(layers[i].activation != Activation::kSoftmax,
              ErrorCode::kConfiguration, "softmax is only allowed on the last layer");
    }
  }
  const Activation last = layers.back().activation;
  if (loss == Loss::kCrossEntropy) {
    Require(last == Activation::kSoftmax, ErrorCode::kConfiguration,
            "cross-entropy requires a softmax output layer");
  } else {
    Require(last == Activation::kSigmoid, ErrorCode::kConfiguration,
            "binary cross-entropy requires a sigmoid output layer");
  }
  return ArchSpec(std::move(layers), loss);
}

ArchSpec ArchSpec::Mlp(std::size_t input_width,
                       std::span<const std::size_t> hidden_widths,
                       std::size_t output_width, Activation hidden_activation) {
  std::vector<Layer> layers;
  std::size_t prev = input_width;
  for (std::size_t h : hidden_widths) {
    layers.push_back({prev, h, hidden_activation});
    prev = h;
  }
  const bool binary = output_width == 1;
  layers.push_back(
      {prev, output_width, binary ? Activation::kSigmoid : Activation::kSoftmax});
  return Create(std::move(layers),
                binary ? Loss::kBinaryCrossEntropy : Loss::kCrossEntropy);
}

Batch MakeBatch(const ArchSpec& arch, const Dataset& data,
                std::span<const std::size_t> rows) {
  Require(data.feature_count() == arch.input_width(), ErrorCode::kDimension,
          "dataset has " + std::to_string(data.feature_count()) +
              " features, architecture expects " + std::to_string(arch.input_width()));
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto out = static_cast<Eigen::Index>(arch.output_width());
  Batch b{Matrix(n, data.inputs.cols()), Matrix::Zero(n, out)};
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t src = rows[static_cast<std::size_t>(r)];
    Require(src < data.size(), ErrorCode::kIndex, "batch row out of range");
    b.inputs.row(r) = data.inputs.row(static_cast<Eigen::Index>(src));
    const int label = data.labels[src];
    if (out == 1) {
      Require(label == 0 || label == 1, ErrorCode::kData,
              "binary output needs labels in {0,1}");
      b.targets(r, 0) = label;
    } else {
      Require(label >= 0 && label < out, ErrorCode::kData,
              "label " + std::to_string(label) + " exceeds output width");
      b.targets(r, label) = 1.0;
    }
  }
  return b;
}

Batch MakeBatch(const ArchSpec& arch, const Dataset& data) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return MakeBatch(arch, data, rows);
}

Vector InitModel(const ArchSpec& arch, std::uint64_t seed) {
  Vector w(arch.parameter_count(), 0.0);
  Rng rng = MakeStream(seed, StreamTag::kInit);
  for (std::size_t l = 0; l < arch.layers().size(); ++l) {
    const Layer& layer = arch.layers()[l];
    const double limit = std::sqrt(
        6.0 / static_cast<double>(layer.input_width + layer.output_width));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t begin = arch.weight_offset(l);
    const std::size_t end = arch.bias_offset(l);
    for (std::size_t i = begin; i < end; ++i) w[i] = dist(rng);
  }
  return w;
}

ForwardResult ForwardLoss(const ArchSpec& arch, std::span<const double> w,
                          const Batch& batch) {
  CheckWeights(arch, w);
  CheckInputs(arch, batch.inputs);
  CheckTargets(arch, batch);
  Trace t = Forward(arch, w, batch.inputs);
  ForwardResult result;
  result.loss = MeanLoss(arch, t.pre.back(), batch.targets);
  result.predictions = std::move(t.act.back());
  return result;
}

Matrix Predict(const ArchSpec& arch, std::span<const double> w,
               const Matrix& inputs) {
  CheckWeights(arch, w);
  CheckInputs(arch, inputs);
  return std::move(Forward(arch, w, inputs).act.back());
}

Vector Gradient(const ArchSpec& arch, std::span<const double> w,
                const Batch& batch) {
  CheckWeights(arch, w);
  CheckInputs(arch, batch.inputs);
  CheckTargets(arch, batch);
  const Trace t = Forward(arch, w, batch.inputs);
  Vector grad(w.size(), 0.0);

  // Softmax/CE and sigmoid/BCE share the output delta (p - y).
  Matrix delta = (t.act.back() - batch.targets) /
                 static_cast<double>(batch.inputs.rows());
  for (std::size_t l = arch.layers().size(); l-- > 0;) {
    const Layer& layer = arch.layers()[l];
    MatrixMap gw(grad.data() + arch.weight_offset(l),
                 static_cast<Eigen::Index>(layer.output_width),
                 static_cast<Eigen::Index>(layer.input_width));
    RowVectorMap gb(grad.data() + arch.bias_offset(l),
                    static_cast<Eigen::Index>(layer.output_width));
    gw.noalias() = delta.transpose() * t.act[l];
    gb = delta.colwise().sum();
    if (l == 0) break;
    Matrix upstream = delta * LayerWeights(arch, w, l);
    const Matrix& z = t.pre[l - 1];
    const Matrix& a = t.act[l];
    switch (arch.layers()[l - 1].activation) {
      case Activation::kIdentity:
        break;
      case Activation::kRelu:
        upstream = upstream.cwiseProduct(
            z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
        break;
      case Activation::kSigmoid:
        upstream = upstream.cwiseProduct(
            a.unaryExpr([](double s) { return s * (1.0 - s); }));
        break;
      case Activation::kSoftmax:
        throw Error(ErrorCode::kConfiguration, "softmax in a hidden layer");
    }
    delta = std::move(upstream);
  }
  return grad;
}

BatchSampler::BatchSampler(std::size_t dataset_size, std::size_t batch_size,
                           std::uint64_t seed)
    : order_(dataset_size),
      batch_size_(std::min(batch_size, dataset_size)),
      cursor_(dataset_size),
      seed_(seed) {
  Require(dataset_size > 0, ErrorCode::kData, "empty dataset");
  Require(batch_size > 0, ErrorCode::kConfiguration, "batch size must be positive");
}

std::span<const std::size_t> BatchSampler::Next() {
  if (cursor_ + batch_size_ > order_.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng = MakeStream(seed_, StreamTag::kLocalTraining, {epoch_++});
    std::shuffle(order_.begin(), order_.end(), rng);
    cursor_ = 0;
  }
  std::span<const std::size_t> batch(order_.data() + cursor_, batch_size_);
  cursor_ += batch_size_;
  return batch;
}

namespace {

// Shared by Sgd and TopKSgd so that the all-coordinate case of the latter
// performs the same floating point operations as the former.
Vector Train(const ArchSpec& arch, const Dataset& data, Vector w,
             const IndexSet* retained, const SgdOptions& options,
             std::uint64_t seed) {
  CheckWeights(arch, w);
  Require(options.steps >= 1, ErrorCode::kConfiguration,
          "local SGD needs at least one step");
  Require(data.size() > 0, ErrorCode::kData, "empty dataset");
  BatchSampler sampler(data.size(), options.batch_size, seed);
  const double eta = options.learning_rate;
  for (int step = 0; step < options.steps; ++step) {
    const Batch batch = MakeBatch(arch, data, sampler.Next());
    const Vector g = Gradient(arch, w, batch);
    if (retained == nullptr) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += -(eta * g[i]);
    } else {
      for (std::size_t i : retained->indices()) w[i] += -(eta * g[i]);
    }
  }
  return w;
}

}  // namespace

Vector Sgd(const ArchSpec& arch, const Dataset& data, Vector w,
           const SgdOptions& options, std::uint64_t seed) {
  return Train(arch, data, std::move(w), nullptr, options, seed);
}

Vector TopKSgd(const ArchSpec& arch, const Dataset& data, Vector w,
               std::span<const double> frozen, const IndexSet& retained,
               const SgdOptions& options, std::uint64_t seed) {
  CheckWeights(arch, w);
  CheckWeights(arch, frozen);
  Require(retained.dimension() == w.size(), ErrorCode::kIndex,
          "index set dimension does not match the model");
  // Outside the retained set the model must already sit at the frozen values;
  // training never touches those coordinates afterwards.
  std::size_t j = 0;
  const auto idx = retained.indices();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (j < idx.size() && idx[j] == i) {
      ++j;
      continue;
    }
    Require(w[i] == frozen[i], ErrorCode::kConfiguration,
            "coordinate " + std::to_string(i) +
                " outside the retained set differs from the frozen base");
  }
  return Train(arch, data, std::move(w), &retained, options, seed);
}

}  // namespace fltop::nn
