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

#include "fltop/metrics.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>

#include "fltop/bandwidth.h"
#include "fltop/error.h"
#include "fltop/index_set.h"
#include "fltop/report.h"
#include "fltop/scheme.h"
#include "oracles.h"
#include "test_util.h"

namespace fltop {
namespace {

using ::fltop::testing::PairwiseAuroc;

TEST(MetricsTest, PerfectClassifier) {
  const std::vector<int> labels = {1, 0, 1, 0, 0};
  EXPECT_EQ(metrics::Accuracy(labels, labels), 1.0);
  EXPECT_EQ(metrics::BalancedAccuracy(labels, labels), 1.0);
  const std::vector<double> scores = {0.9, 0.1, 0.8, 0.2, 0.3};
  EXPECT_EQ(metrics::Auroc(scores, labels), 1.0);
}

TEST(MetricsTest, ConstantScoresGiveHalf) {
  const std::vector<int> labels = {1, 0, 1, 0, 0};
  const std::vector<double> scores(5, 0.4);
  EXPECT_EQ(metrics::Auroc(scores, labels), 0.5);
}

TEST(MetricsTest, WorkedAurocExamples) {
  const std::vector<double> scores = {0.9, 0.8, 0.3, 0.1};
  EXPECT_EQ(metrics::Auroc(scores, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_EQ(metrics::Auroc(scores, std::vector<int>{1, 0, 1, 0}), 0.75);
  EXPECT_EQ(PairwiseAuroc(scores, std::vector<int>{1, 0, 1, 0}), 0.75);
}

TEST(MetricsTest, AurocMatchesPairwiseOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coarse(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(60);
    std::vector<int> labels(60);
    for (std::size_t i = 0; i < 60; ++i) {
      scores[i] = coarse(rng) / 10.0;  // plenty of ties
      labels[i] = static_cast<int>(i % 3 == 0);
    }
    EXPECT_NEAR(metrics::Auroc(scores, labels), PairwiseAuroc(scores, labels), 1e-12);
  }
}

TEST(MetricsTest, BalancedAccuracyIsMeanRecall) {
  // 8 negatives all right, 2 positives half right: (1 + 0.5) / 2.
  const std::vector<int> labels = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  const std::vector<int> pred = {0, 0, 0, 0, 0, 0, 0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(metrics::BalancedAccuracy(pred, labels), 0.75);
  EXPECT_DOUBLE_EQ(metrics::Accuracy(pred, labels), 0.9);
}

TEST(MetricsTest, Errors) {
  const std::vector<double> scores = {0.1, 0.2};
  EXPECT_FLTOP_ERROR(metrics::Auroc(scores, std::vector<int>{1, 1}), ErrorCode::kData);
  EXPECT_FLTOP_ERROR(metrics::Accuracy(std::vector<int>{}, std::vector<int>{}),
                     ErrorCode::kData);
  EXPECT_FLTOP_ERROR(metrics::Accuracy(std::vector<int>{1}, std::vector<int>{1, 0}),
                     ErrorCode::kDimension);
}

TEST(BandwidthTest, PublishedCells) {
  const std::size_t n = 1663370;
  const double c = 1.0 / 60.0;
  EXPECT_NEAR(BandwidthCostKb(0.005, n, 200, c, true), 110.88, 0.02);
  EXPECT_NEAR(BandwidthCostKb(0.05, n, 200, c, true), 1108.91, 0.02);
  EXPECT_NEAR(BandwidthCostKb(0.10, n, 199, c, true), 2206.74, 0.02);
  EXPECT_NEAR(BandwidthCostKb(0.005, n, 200, c, false), 22178.27, 0.02);
  EXPECT_EQ(BandwidthCostKb(0.05, n, 0, c, true), 0.0);
}

TEST(SchemeTest, NamedMappings) {
  EXPECT_EQ(SchemeNames().size(), 14u);
  for (std::string_view name : SchemeNames()) {
    EXPECT_EQ(SchemeName(SchemeByName(name)), name);
  }
  const SchemeSpec top = SchemeByName("fl-top");
  EXPECT_EQ(top.selection, Selection::kTopK);
  EXPECT_TRUE(top.fixed_across_rounds && top.reinit_nonselected && !top.dp);
  const SchemeSpec b2 = SchemeByName("fl-bas-2-dp");
  EXPECT_EQ(b2.selection, Selection::kRandom);
  EXPECT_FALSE(b2.fixed_across_rounds || b2.reinit_nonselected);
  EXPECT_TRUE(b2.dp);
  EXPECT_FALSE(SchemeByName("fl-top-bis").reinit_nonselected);
  EXPECT_TRUE(SchemeByName("fl-bas-3").fixed_across_rounds);
  EXPECT_FALSE(SchemeByName("fl-bas-4").reinit_nonselected);
}

TEST(SchemeTest, DownstreamAccounting) {
  EXPECT_TRUE(DownstreamCompressed(SchemeByName("fl-top")));
  EXPECT_TRUE(DownstreamCompressed(SchemeByName("fl-bas-3")));
  EXPECT_TRUE(DownstreamCompressed(SchemeByName("fl-top-bis-dp")));
  EXPECT_FALSE(DownstreamCompressed(SchemeByName("fl-basic")));
  EXPECT_FALSE(DownstreamCompressed(SchemeByName("fl-bas-2")));
  EXPECT_FALSE(DownstreamCompressed(SchemeByName("fl-std")));
}

TEST(SchemeTest, UnknownNameListsValidOnes) {
  try {
    SchemeByName("fl-cs");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
    EXPECT_NE(std::string(e.what()).find("fl-top-dp"), std::string::npos);
  }
}

TEST(IndexSetTest, ValidatesAndSorts) {
  const IndexSet s = IndexSet::FromIndices({5, 1, 3}, 6);
  EXPECT_EQ(std::vector<std::size_t>(s.indices().begin(), s.indices().end()),
            (std::vector<std::size_t>{1, 3, 5}));
  EXPECT_DOUBLE_EQ(s.ratio(), 0.5);
  EXPECT_TRUE(s.Contains(3));
  EXPECT_FALSE(s.Contains(2));
  EXPECT_FLTOP_ERROR(IndexSet::FromIndices({1, 1}, 6), ErrorCode::kIndex);
  EXPECT_FLTOP_ERROR(IndexSet::FromIndices({6}, 6), ErrorCode::kIndex);
}

TEST(IndexSetTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("fltop_index_" + std::to_string(::getpid()));
  const IndexSet s = IndexSet::FromIndices({0, 9, 42}, 100);
  WriteIndexFile(path, s);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "0\n9\n42\n");
  EXPECT_EQ(ReadIndexFile(path, 100), s);
  EXPECT_FLTOP_ERROR(ReadIndexFile(path, 10), ErrorCode::kIndex);
  std::ofstream(path) << "3\n1\n";
  EXPECT_FLTOP_ERROR(ReadIndexFile(path, 10), ErrorCode::kFormat);
  std::ofstream(path) << "3\nx\n";
  EXPECT_FLTOP_ERROR(ReadIndexFile(path, 10), ErrorCode::kFormat);
  std::filesystem::remove(path);
}

TEST(ReportTest, TraceCsvLayout) {
  std::vector<RoundMetrics> trace(2);
  trace[0] = {1, 0.5, 0.25, std::numeric_limits<double>::quiet_NaN(), 1.5, 2.0, {}, 0};
  trace[1] = {2, 0.75, 0.5, 0.625, 3.0, 4.0, 0.125, 3};
  std::ostringstream out;
  WriteTraceCsv(out, trace);
  EXPECT_EQ(out.str(),
            "round,accuracy,balanced_accuracy,auroc,down_kb,up_kb,epsilon,clamps\n"
            "1,0.5,0.25,nan,1.5,2,,0\n"
            "2,0.75,0.5,0.625,3,4,0.125,3\n");
  EXPECT_EQ(FormatNumber(0.1), "0.1");
}

}  // namespace
}  // namespace fltop
