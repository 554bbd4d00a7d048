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

#include "fltop/federation.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fltop/bandwidth.h"
#include "fltop/compression.h"
#include "fltop/error.h"
#include "fltop/random.h"
#include "federation_fixture.h"
#include "test_util.h"

namespace fltop {
namespace {

using ::fltop::testing::SmallArch;
using ::fltop::testing::SyntheticFederation;

FederationConfig BaseConfig(const char* scheme) {
  FederationConfig c;
  c.scheme = SchemeByName(scheme);
  c.num_clients = 10;
  c.sampling = 0.4;
  c.rounds = 5;
  c.local = {3, 0.3, 5};
  c.ratio = 0.2;
  c.noise_multiplier = 1.0;
  c.sensitivity = 1.0;
  return c;
}

class FederationTest : public ::testing::Test {
 protected:
  FederationTest() : data_(SyntheticFederation(10, 20, 6, 3.0, 9)), arch_(SmallArch(6)) {}

  FederationContext Prepare(const FederationConfig& c) const {
    return PrepareFederation(arch_, c, data_);
  }

  FederationData data_;
  nn::ArchSpec arch_;
};

TEST_F(FederationTest, TopKWithAllCoordinatesEqualsStandard) {
  FederationConfig top = BaseConfig("fl-top");
  top.ratio = 1.0;
  const FederationContext a = Prepare(top);
  const FederationContext b = Prepare(BaseConfig("fl-std"));
  ASSERT_TRUE(a.fixed_set.is_all());
  FederationState sa = InitialState(a);
  FederationState sb = InitialState(b);
  ASSERT_EQ(sa.global, sb.global);
  for (int t = 0; t < 5; ++t) {
    RunRound(a, sa);
    RunRound(b, sb);
    ASSERT_EQ(sa.global, sb.global) << "round " << t + 1;
  }
}

TEST_F(FederationTest, ServerAppliesMeanOfClientUpdates) {
  const FederationContext ctx = Prepare(BaseConfig("fl-top"));
  FederationState state = InitialState(ctx);
  RunRound(ctx, state);
  RunRound(ctx, state);
  // Recompute round 3 from the outside.
  Vector expected = state.global;
  const IndexSet& set = ctx.fixed_set;
  const std::vector<std::size_t> cohort = SampleCohort(ctx, 3);
  ASSERT_EQ(cohort.size(), 4u);
  std::vector<double> mean(set.size(), 0.0);
  for (std::size_t c : cohort) {
    const CompressedUpdate u = LocalUpdate(
        ctx.arch, ctx.data.clients[c], state.global, set, true, ctx.config.local,
        DeriveSeed(ctx.config.seeds.sampling, StreamTag::kLocalTraining, {3, c}));
    for (std::size_t j = 0; j < set.size(); ++j) mean[j] += u.values[j] / 4.0;
  }
  for (std::size_t j = 0; j < set.size(); ++j) expected[set.indices()[j]] += mean[j];
  RunRound(ctx, state);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(state.global[i], expected[i], 1e-15) << i;
  }
}

TEST_F(FederationTest, ZeroLearningRateKeepsModel) {
  FederationConfig c = BaseConfig("fl-top");
  c.num_clients = 10;
  c.sampling = 0.1;
  c.local.learning_rate = 0.0;
  const FederationContext ctx = Prepare(c);
  FederationState state = InitialState(ctx);
  RunRound(ctx, state);
  EXPECT_EQ(state.global, ctx.w0);
}

TEST_F(FederationTest, SingleClientStandardRoundIsLocalResult) {
  FederationConfig c = BaseConfig("fl-std");
  c.sampling = 0.1;
  const FederationContext ctx = Prepare(c);
  FederationState state = InitialState(ctx);
  const std::size_t client = SampleCohort(ctx, 1).at(0);
  const Vector local = nn::Sgd(
      ctx.arch, ctx.data.clients[client], ctx.w0, c.local,
      DeriveSeed(c.seeds.sampling, StreamTag::kLocalTraining, {1, client}));
  RunRound(ctx, state);
  for (std::size_t i = 0; i < local.size(); ++i) {
    EXPECT_NEAR(state.global[i], local[i], 1e-15);
  }
}

TEST_F(FederationTest, CohortIsUniformWithoutReplacement) {
  const FederationContext ctx = Prepare(BaseConfig("fl-std"));
  std::vector<int> hits(10, 0);
  for (int t = 1; t <= 2000; ++t) {
    std::vector<std::size_t> c = SampleCohort(ctx, t);
    ASSERT_EQ(c.size(), 4u);
    std::sort(c.begin(), c.end());
    EXPECT_EQ(std::adjacent_find(c.begin(), c.end()), c.end());
    for (std::size_t k : c) ++hits[k];
  }
  for (int h : hits) EXPECT_NEAR(h / 2000.0, 0.4, 0.04);
}

void ExpectFrozen(const FederationContext& ctx) {
  FederationState state = InitialState(ctx);
  for (int t = 1; t <= 20; ++t) {
    RunRound(ctx, state);
    for (std::size_t i = 0; i < ctx.w0.size(); ++i) {
      if (!state.ever_selected[i]) ASSERT_EQ(state.global[i], ctx.w0[i]) << t << " " << i;
    }
    for (std::size_t len : state.upload_lengths) EXPECT_EQ(len, ctx.k);
  }
}

TEST_F(FederationTest, CoordinateFreezeAndMessageLength) {
  for (const char* name : {"fl-top", "fl-basic", "fl-bas-3", "fl-top-bis", "fl-bas-2",
                           "fl-bas-4", "fl-top-dp", "fl-basic-dp"}) {
    SCOPED_TRACE(name);
    ExpectFrozen(Prepare(BaseConfig(name)));
  }
}

TEST_F(FederationTest, FixedSetSchemesTouchOnlyTheSet) {
  for (const char* name : {"fl-top", "fl-top-bis", "fl-bas-3", "fl-bas-4"}) {
    const FederationContext ctx = Prepare(BaseConfig(name));
    FederationState state = InitialState(ctx);
    for (int t = 0; t < 5; ++t) RunRound(ctx, state);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < ctx.w0.size(); ++i) {
      if (!ctx.fixed_set.Contains(i)) {
        EXPECT_EQ(state.global[i], ctx.w0[i]) << name;
      } else {
        moved += state.global[i] != ctx.w0[i];
      }
    }
    EXPECT_GT(moved, 0u) << name;
  }
}

TEST_F(FederationTest, PerRoundSetsChange) {
  const FederationContext ctx = Prepare(BaseConfig("fl-basic"));
  EXPECT_TRUE(ctx.fixed_set.empty());
  EXPECT_NE(RoundIndexSet(ctx, 1), RoundIndexSet(ctx, 2));
  EXPECT_EQ(RoundIndexSet(ctx, 1).size(), ctx.k);
}

TEST_F(FederationTest, NearZeroNoiseDpTracksPlainRun) {
  for (auto [plain, dp] : {std::pair{"fl-top", "fl-top-dp"}, {"fl-std", "fl-std-dp"}}) {
    FederationConfig pc = BaseConfig(plain);
    FederationConfig dc = BaseConfig(dp);
    dc.noise_multiplier = 1e-9;
    dc.sensitivity = 10.0;  // well above every update norm
    const FederationContext a = Prepare(pc);
    const FederationContext b = Prepare(dc);
    FederationState sa = InitialState(a);
    FederationState sb = InitialState(b);
    for (int t = 0; t < 3; ++t) {
      RunRound(a, sa);
      RunRound(b, sb);
    }
    for (std::size_t i = 0; i < sa.global.size(); ++i) {
      EXPECT_NEAR(sa.global[i], sb.global[i], 1e-7) << plain << " " << i;
    }
    EXPECT_EQ(sb.clamp_count, 0u);
  }
}

TEST_F(FederationTest, TraceBandwidthAndEpsilon) {
  FederationConfig c = BaseConfig("fl-basic-dp");
  c.rounds = 6;
  const FederationContext ctx = Prepare(c);
  const std::vector<RoundMetrics> trace = RunExperiment(ctx);
  ASSERT_EQ(trace.size(), 6u);
  const std::size_t n = ctx.w0.size();
  const double r = static_cast<double>(ctx.k) / static_cast<double>(n);
  const privacy::MomentsAccountant acc(c.noise_multiplier, c.sampling);
  for (const RoundMetrics& m : trace) {
    EXPECT_EQ(m.down_kb, BandwidthCostKb(r, n, m.round, c.sampling, false));
    EXPECT_EQ(m.up_kb, BandwidthCostKb(r, n, m.round, c.sampling, true));
    ASSERT_TRUE(m.epsilon.has_value());
    EXPECT_EQ(*m.epsilon, acc.Epsilon(m.round, c.delta).epsilon);
  }
  for (std::size_t t = 1; t < trace.size(); ++t) {
    EXPECT_GE(trace[t].down_kb, trace[t - 1].down_kb);
    EXPECT_GE(*trace[t].epsilon, *trace[t - 1].epsilon);
  }
}

TEST_F(FederationTest, NonPrivateTraceHasNoEpsilon) {
  const std::vector<RoundMetrics> trace = RunExperiment(Prepare(BaseConfig("fl-top")));
  for (const RoundMetrics& m : trace) EXPECT_FALSE(m.epsilon.has_value());
}

TEST_F(FederationTest, ZeroRoundsAndDeterminism) {
  FederationConfig c = BaseConfig("fl-top-dp");
  c.rounds = 0;
  EXPECT_TRUE(RunExperiment(Prepare(c)).empty());
  c.rounds = 4;
  c.sensitivity.reset();
  const FederationContext a = Prepare(c);
  const FederationContext b = Prepare(c);
  EXPECT_GT(a.sensitivity, 0.0);
  const auto ta = RunExperiment(a);
  const auto tb = RunExperiment(b);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].accuracy, tb[i].accuracy);
    EXPECT_EQ(ta[i].auroc, tb[i].auroc);
  }
}

TEST_F(FederationTest, ConfigurationErrors) {
  FederationConfig c = BaseConfig("fl-top-dp");
  c.sampling = 0.1;  // one client per round
  EXPECT_FLTOP_ERROR(Prepare(c), ErrorCode::kConfiguration);
  c = BaseConfig("fl-top");
  c.sampling = 0.0;
  EXPECT_FLTOP_ERROR(Prepare(c), ErrorCode::kConfiguration);
  c = BaseConfig("fl-top");
  c.ratio = 1.5;
  EXPECT_FLTOP_ERROR(Prepare(c), ErrorCode::kConfiguration);
  c = BaseConfig("fl-top");
  c.num_clients = 9;
  EXPECT_FLTOP_ERROR(Prepare(c), ErrorCode::kConfiguration);
}

TEST_F(FederationTest, PinnedIndexSet) {
  const FederationConfig c = BaseConfig("fl-top");
  const FederationContext ref = Prepare(c);
  const FederationContext pinned = PrepareFederation(arch_, c, data_, &ref.fixed_set);
  EXPECT_EQ(pinned.fixed_set, ref.fixed_set);
  const IndexSet wrong = IndexSet::FromIndices({0}, ref.w0.size());
  EXPECT_FLTOP_ERROR(PrepareFederation(arch_, c, data_, &wrong), ErrorCode::kConfiguration);
}

TEST(SummarizeTest, BestMetricEarliestRound) {
  std::vector<RoundMetrics> trace(3);
  trace[0] = {1, 0.9, 0.6, 0.7, 1, 1, {}, 0};
  trace[1] = {2, 0.8, 0.8, 0.7, 2, 2, {}, 0};
  trace[2] = {3, 0.9, 0.8, 0.7, 3, 3, {}, 0};
  const RunSummary binary = Summarize(trace, 2);
  EXPECT_EQ(binary.metric, "balanced_accuracy");
  EXPECT_EQ(binary.at_best.round, 2);
  const RunSummary multi = Summarize(trace, 10);
  EXPECT_EQ(multi.metric, "accuracy");
  EXPECT_EQ(multi.at_best.round, 1);
  EXPECT_FLTOP_ERROR(Summarize(std::vector<RoundMetrics>{}, 2), ErrorCode::kData);
}

}  // namespace
}  // namespace fltop
