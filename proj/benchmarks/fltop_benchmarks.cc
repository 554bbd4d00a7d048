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


#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fltop/accountant.h"
#include "fltop/compression.h"
#include "fltop/dataset.h"
#include "fltop/nn.h"
#include "fltop/secure_agg.h"

namespace fltop {
namespace {

Dataset RandomData(std::size_t rows, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d;
  d.inputs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(features));
  for (Eigen::Index r = 0; r < d.inputs.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.inputs.cols(); ++c) d.inputs(r, c) = u(rng);
    d.labels.push_back(static_cast<int>(rng() & 1));
  }
  return d;
}

void BM_Gradient(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const std::vector<std::size_t> widths = {hidden, hidden};
  const nn::ArchSpec arch = nn::ArchSpec::Mlp(64, widths, 1);
  const Vector w = nn::InitModel(arch, 1);
  const nn::Batch batch = nn::MakeBatch(arch, RandomData(10, 64, 2));
  for (auto _ : state) benchmark::DoNotOptimize(nn::Gradient(arch, w, batch));
  state.counters["params"] = static_cast<double>(arch.parameter_count());
}
BENCHMARK(BM_Gradient)->Arg(32)->Arg(128)->Arg(512);

void BM_LogMoment(benchmark::State& state) {
  const int lambda = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(privacy::LogMoment(lambda, 1.54, 1.0 / 60.0));
  }
}
BENCHMARK(BM_LogMoment)->Arg(1)->Arg(16)->Arg(64);

void BM_AccountantBuild(benchmark::State& state) {
  for (auto _ : state) {
    const privacy::MomentsAccountant acc(1.49, 100.0 / 5010.0);
    benchmark::DoNotOptimize(acc.Epsilon(100, 1e-5));
  }
}
BENCHMARK(BM_AccountantBuild)->Unit(benchmark::kMillisecond);

void BM_SecureAggregation(benchmark::State& state) {
  const auto clients = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const secagg::FixedPointCodec codec(32, 64, clients, secagg::OverflowPolicy::kClamp);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<std::vector<double>> updates(clients, std::vector<double>(dim));
  for (auto& u : updates) {
    for (double& x : u) x = noise(rng);
  }
  for (auto _ : state) {
    const secagg::MaskSet masks = secagg::MakeMasks(clients, dim, 4);
    std::vector<secagg::MaskedUpdate> inbox;
    inbox.reserve(clients);
    for (std::size_t c = 0; c < clients; ++c) {
      inbox.push_back(secagg::Encrypt(codec.Encode(updates[c]).residues, masks.masks[c]));
    }
    benchmark::DoNotOptimize(secagg::AggregateDecode(inbox, codec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clients * dim));
}
BENCHMARK(BM_SecureAggregation)->Args({16, 1000})->Args({100, 1000})->Args({100, 10000});

void BM_SelectTopK(benchmark::State& state) {
  const std::vector<std::size_t> widths = {128};
  const nn::ArchSpec arch = nn::ArchSpec::Mlp(64, widths, 1);
  const Vector w0 = nn::InitModel(arch, 5);
  const nn::Batch batch = nn::MakeBatch(arch, RandomData(100, 64, 6));
  const auto k = static_cast<std::size_t>(
      static_cast<double>(arch.parameter_count()) * static_cast<double>(state.range(0)) / 1000.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SelectTopK(arch, w0, batch, 5, k, 0.1));
  }
}
BENCHMARK(BM_SelectTopK)->Arg(5)->Arg(50)->Arg(100);

}  // namespace
}  // namespace fltop

BENCHMARK_MAIN();
