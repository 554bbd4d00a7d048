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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fltop/error.h"
#include "oracles.h"
#include "test_util.h"

namespace fltop {
namespace {

using ::fltop::testing::FiniteDifferenceGradient;
using ::fltop::testing::RandomVector;
using ::fltop::testing::SeparableData;

TEST(CompressTest, PicksCoordinates) {
  const Vector v = {10, 11, 12, 13, 14};
  const IndexSet set = IndexSet::FromIndices({4, 1}, 5);
  EXPECT_EQ(Compress(v, set).values, (std::vector<double>{11, 14}));
}

TEST(CompressTest, UnitVectorGivesOneHot) {
  Vector e(6, 0.0);
  e[3] = 1.0;
  const IndexSet set = IndexSet::FromIndices({1, 3, 5}, 6);
  EXPECT_EQ(Compress(e, set).values, (std::vector<double>{0, 1, 0}));
}

TEST(CompressTest, LengthMismatchIsDimensionError) {
  EXPECT_FLTOP_ERROR(Compress(Vector(4, 0.0), IndexSet::All(5)), ErrorCode::kDimension);
  EXPECT_FLTOP_ERROR(Expand(CompressedUpdate{{1.0}}, IndexSet::All(2), Vector(2, 0.0)),
                     ErrorCode::kDimension);
}

TEST(CompressTest, RoundTripThroughExpand) {
  const IndexSet set = IndexSet::FromIndices({0, 2, 7}, 9);
  const CompressedUpdate c{{1.5, -2.0, 3.25}};
  EXPECT_EQ(Compress(Expand(c, set, Vector(9, 0.0)), set), c);

  const Vector base = RandomVector(9, -1, 1, 3);
  const Vector v = RandomVector(9, -1, 1, 4);
  const Vector restored = Expand(Compress(v, set), set, base);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(restored[i], set.Contains(i) ? v[i] : base[i]);
  }
}

TEST(ExpandTest, AllIgnoresBaseEmptyKeepsBase) {
  const Vector base = RandomVector(5, -1, 1, 1);
  const Vector v = RandomVector(5, -1, 1, 2);
  EXPECT_EQ(Expand(Compress(v, IndexSet::All(5)), IndexSet::All(5), base), v);
  EXPECT_EQ(Expand(CompressedUpdate{}, IndexSet::Empty(5), base), base);
}

TEST(CompressTest, Linearity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 50;
    const Vector u = RandomVector(n, -5, 5, seed);
    const Vector v = RandomVector(n, -5, 5, seed + 100);
    const double alpha = 1.7 + static_cast<double>(seed);
    const double beta = -0.3 * static_cast<double>(seed);
    const IndexSet set = SelectRandom(n, 17, seed);
    Vector mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = alpha * u[i] + beta * v[i];
    const CompressedUpdate lhs = Compress(mix, set);
    const CompressedUpdate cu = Compress(u, set);
    const CompressedUpdate cv = Compress(v, set);
    for (std::size_t j = 0; j < set.size(); ++j) {
      EXPECT_EQ(lhs.values[j], alpha * cu.values[j] + beta * cv.values[j]);
    }
  }
}

TEST(LargestKTest, TiesGoToLowerIndex) {
  const std::vector<double> scores = {1.0, 3.0, 2.0, 3.0, 3.0};
  EXPECT_EQ(LargestK(scores, 2), IndexSet::FromIndices({1, 3}, 5));
  EXPECT_EQ(LargestK(scores, 1), IndexSet::FromIndices({1}, 5));
  EXPECT_EQ(LargestK(std::vector<double>(4, 0.0), 2), IndexSet::FromIndices({0, 1}, 4));
}

TEST(SelectTopKTest, KEqualsNIsAll) {
  const Dataset d = SeparableData(10, 3, 1);
  const std::size_t hidden[] = {2};
  const nn::ArchSpec arch = nn::ArchSpec::Mlp(3, hidden, 1);
  const Vector w0 = nn::InitModel(arch, 1);
  EXPECT_TRUE(SelectTopK(arch, w0, nn::MakeBatch(arch, d), 5, arch.parameter_count(),
                         0.1)
                  .is_all());
  EXPECT_FLTOP_ERROR(SelectTopK(arch, w0, nn::MakeBatch(arch, d), 5,
                                arch.parameter_count() + 1, 0.1),
                     ErrorCode::kConfiguration);
}

TEST(SelectTopKTest, MatchesBruteForceAccumulation) {
  // 3 inputs -> 1 sigmoid output: 4 parameters.
  const nn::ArchSpec arch =
      nn::ArchSpec::Create({{3, 1, nn::Activation::kSigmoid}}, nn::Loss::kBinaryCrossEntropy);
  Dataset d;
  d.inputs.resize(4, 3);
  d.inputs << 0.1, 2.0, 0.0, 0.2, 3.0, 0.1, 0.0, 2.5, 0.2, 0.1, 1.5, 0.0;
  d.labels = {1, 1, 0, 1};
  const Vector w0 = {0.1, -0.2, 0.05, 0.0};
  const nn::Batch batch = nn::MakeBatch(arch, d);
  const double eta = 0.5;
  const int steps = 5;

  Vector w = w0;
  std::vector<double> acc(4, 0.0);
  for (int s = 0; s < steps; ++s) {
    const Vector g = FiniteDifferenceGradient(arch, w, batch, 1e-6);
    for (std::size_t i = 0; i < 4; ++i) {
      acc[i] += std::abs(g[i]);
      w[i] -= eta * g[i];
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < 4; ++i) {
    if (acc[i] > acc[best]) best = i;
  }
  ASSERT_EQ(best, 1u);
  EXPECT_EQ(SelectTopK(arch, w0, batch, steps, 1, eta), IndexSet::FromIndices({best}, 4));
}

TEST(SelectRandomTest, DeterministicAndDegenerate) {
  EXPECT_EQ(SelectRandom(100, 10, 5), SelectRandom(100, 10, 5));
  EXPECT_NE(SelectRandom(100, 10, 5), SelectRandom(100, 10, 6));
  EXPECT_TRUE(SelectRandom(17, 17, 1).is_all());
  EXPECT_EQ(SelectRandom(100, 10, 5).size(), 10u);
  EXPECT_FLTOP_ERROR(SelectRandom(5, 6, 1), ErrorCode::kConfiguration);
}

TEST(SelectRandomTest, MarginalFrequencies) {
  std::vector<int> hits(100, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const IndexSet set = SelectRandom(100, 10, static_cast<std::uint64_t>(t));
    for (std::size_t i : set.indices()) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / draws, 0.10, 0.01);
}

TEST(LocalUpdateTest, ReinitMovesOnlySelected) {
  const Dataset d = SeparableData(30, 3, 2);
  const std::size_t hidden[] = {4};
  const nn::ArchSpec arch = nn::ArchSpec::Mlp(3, hidden, 1);
  const Vector start = nn::InitModel(arch, 2);
  const IndexSet set = IndexSet::FromIndices({0, 5, 9}, start.size());
  const nn::SgdOptions opts{3, 0.2, 10};
  const CompressedUpdate reinit = LocalUpdate(arch, d, start, set, true, opts, 4);
  const CompressedUpdate free = LocalUpdate(arch, d, start, set, false, opts, 4);
  EXPECT_EQ(reinit.size(), 3u);
  EXPECT_EQ(free.size(), 3u);

  const Vector expected = nn::TopKSgd(arch, d, start, start, set, opts, 4);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(reinit.values[j], expected[set.indices()[j]] - start[set.indices()[j]]);
  }
}

TEST(RetainedCountTest, RoundsAndClamps) {
  EXPECT_EQ(RetainedCount(0.05, 1000), 50u);
  EXPECT_EQ(RetainedCount(1e-9, 1000), 1u);
  EXPECT_EQ(RetainedCount(1.0, 1000), 1000u);
  EXPECT_FLTOP_ERROR(RetainedCount(0.0, 10), ErrorCode::kConfiguration);
}

}  // namespace
}  // namespace fltop
