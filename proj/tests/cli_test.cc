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


#include "commands.h"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "experiment_config.h"
#include "fltop/bandwidth.h"
#include "fltop/data.h"
#include "fltop/index_set.h"
#include "fltop/scheme.h"

namespace fltop::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fltop_cli_test_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return Main(args, out_, err_);
  }

  static json SmallConfig(const std::string& scheme) {
    return {
        {"scheme", scheme},
        {"dataset",
         {{"synthetic",
           {{"samples", 250}, {"features", 8}, {"dense", 8}, {"separation", 3.0},
            {"seed", 5}}},
          {"public_size", 40}}},
        {"model", {{"hidden", {6}}}},
        {"federation",
         {{"num_clients", 10},
          {"sampling", 0.3},
          {"rounds", 4},
          {"local_steps", 2},
          {"learning_rate", 0.2},
          {"batch_size", 5},
          {"ratio", 0.2}}},
    };
  }

  std::string Write(const json& j, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, RunWritesTraceSummaryAndResolvedConfig) {
  const std::string config = Write(SmallConfig("fl-top"));
  ASSERT_EQ(Run({"run", config, "--output-dir", (dir_ / "out").string()}), kExitOk)
      << err_.str();
  std::ifstream trace(dir_ / "out" / "trace.csv");
  std::string line;
  int rows = -1;
  while (std::getline(trace, line)) ++rows;
  EXPECT_EQ(rows, 4);
  const json summary = json::parse(Slurp(dir_ / "out" / "summary.json"));
  EXPECT_EQ(summary["scheme"], "fl-top");
  EXPECT_EQ(summary["metric"], "balanced_accuracy");
  const json resolved = json::parse(Slurp(dir_ / "out" / "resolved_config.json"));
  EXPECT_EQ(resolved["seeds"]["masks"], 4);
  EXPECT_EQ(resolved["federation"]["sensitivity"], "calibrate");
}

TEST_F(CliTest, RerunFromResolvedConfigIsByteIdentical) {
  const std::string config = Write(SmallConfig("fl-basic-dp"));
  ASSERT_EQ(Run({"run", config, "--output-dir", (dir_ / "a").string()}), kExitOk)
      << err_.str();
  const std::string resolved = (dir_ / "a" / "resolved_config.json").string();
  ASSERT_EQ(Run({"run", resolved, "--output-dir", (dir_ / "b").string()}), kExitOk)
      << err_.str();
  EXPECT_EQ(Slurp(dir_ / "a" / "trace.csv"), Slurp(dir_ / "b" / "trace.csv"));
  json ra = json::parse(Slurp(dir_ / "a" / "resolved_config.json"));
  json rb = json::parse(Slurp(dir_ / "b" / "resolved_config.json"));
  ra.erase("output_dir");
  rb.erase("output_dir");
  EXPECT_EQ(ra, rb);
}

TEST_F(CliTest, UnknownSchemeExitsTwoAndListsNames) {
  const std::string config = Write(SmallConfig("fl-nope"));
  EXPECT_EQ(Run({"run", config}), kExitUsage);
  for (std::string_view name : SchemeNames()) {
    EXPECT_NE(err_.str().find(name), std::string::npos) << name;
  }
}

TEST_F(CliTest, SchemaErrorsExitTwo) {
  json typo = SmallConfig("fl-top");
  typo["federation"]["round"] = 3;
  EXPECT_EQ(Run({"run", Write(typo)}), kExitUsage);
  EXPECT_NE(err_.str().find("federation.round"), std::string::npos);

  json bad_type = SmallConfig("fl-top");
  bad_type["federation"]["sampling"] = "lots";
  EXPECT_EQ(Run({"run", Write(bad_type)}), kExitUsage);

  json out_of_range = SmallConfig("fl-top");
  out_of_range["federation"]["sampling"] = 1.5;
  EXPECT_EQ(Run({"run", Write(out_of_range)}), kExitUsage);

  EXPECT_EQ(Run({"run", (dir_ / "missing.json").string()}), kExitUsage);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(Run({"run", (dir_ / "broken.json").string()}), kExitUsage);
  EXPECT_EQ(Run({"frobnicate"}), kExitUsage);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
  json c = SmallConfig("fl-top");
  c["index_file"] = (dir_ / "bad_index.txt").string();
  std::ofstream(dir_ / "bad_index.txt") << "3\n1000000\n";
  EXPECT_EQ(Run({"run", Write(c)}), kExitRuntime);
}

TEST_F(CliTest, DeskScaleGuard) {
  json c = SmallConfig("fl-top");
  c["federation"]["rounds"] = 2000000000;
  EXPECT_EQ(Run({"run", Write(c)}), kExitUsage);
  EXPECT_NE(err_.str().find("--full-scale"), std::string::npos);
}

TEST_F(CliTest, AccountantMatchesPublishedBudgets) {
  ASSERT_EQ(Run({"accountant", "--sigma", "1.54", "--sampling", "0.016667", "--rounds",
                 "200", "--delta", "1e-5"}),
            kExitOk);
  std::istringstream first(out_.str());
  std::string key;
  double eps = 0.0;
  int lambda = 0;
  first >> key >> eps >> key >> lambda;
  EXPECT_NEAR(eps, 1.0, 0.05);
  EXPECT_GE(lambda, 1);

  ASSERT_EQ(Run({"accountant", "--sigma", "1.49", "--sampling", "0.019960", "--rounds",
                 "62", "--delta", "1e-5"}),
            kExitOk);
  std::istringstream second(out_.str());
  second >> key >> eps;
  EXPECT_NEAR(eps, 0.91, 0.03);
}

TEST_F(CliTest, AccountantRejectsInvalidRanges) {
  EXPECT_EQ(Run({"accountant", "--sigma", "1.5", "--sampling", "0.1", "--rounds", "0"}),
            kExitUsage);
  EXPECT_EQ(Run({"accountant", "--sigma", "0", "--sampling", "0.1", "--rounds", "5"}),
            kExitUsage);
  EXPECT_EQ(Run({"accountant", "--sigma", "1", "--sampling", "1.5", "--rounds", "5"}),
            kExitUsage);
  EXPECT_EQ(Run({"accountant", "--sigma", "1", "--sampling", "0.1", "--rounds", "5",
                 "--delta", "1"}),
            kExitUsage);
  EXPECT_EQ(Run({"accountant", "--sampling", "0.1", "--rounds", "5"}), kExitUsage);
}

TEST_F(CliTest, RatioListDeduplicatesWithWarning) {
  std::ostringstream err;
  EXPECT_EQ(ParseRatioList("0.05, 0.1,0.05,,0.005", err),
            (std::vector<double>{0.05, 0.1, 0.005}));
  EXPECT_NE(err.str().find("duplicate ratio 0.05"), std::string::npos);
  EXPECT_TRUE(ParseRatioList("", err).empty());
  EXPECT_THROW(ParseRatioList("0.1,abc", err), ConfigError);
}

TEST_F(CliTest, SweepEmitsOneRowPerRatio) {
  const std::string config = Write(SmallConfig("fl-top-dp"));
  ASSERT_EQ(Run({"sweep", config, "--ratios", "0.1,0.2,0.1", "--output-dir",
                 (dir_ / "sweep").string()}),
            kExitOk)
      << err_.str();
  EXPECT_NE(err_.str().find("duplicate"), std::string::npos);
  std::ifstream table(dir_ / "sweep" / "sweep.csv");
  std::string header;
  std::getline(table, header);
  EXPECT_EQ(header, "ratio,scheme,metric,best,round,down_kb,up_kb,epsilon");
  std::vector<std::string> rows;
  for (std::string line; std::getline(table, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 2u);

  // Bandwidth columns equal the formula at the reported round.
  for (const std::string& row : rows) {
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 8u);
    const json summary = json::parse(
        Slurp(dir_ / "sweep" / ("ratio_" + cells[0]) / "summary.json"));
    const double r = summary["ratio"];
    const std::size_t n = summary["parameters"];
    const int round = std::stoi(cells[4]);
    EXPECT_EQ(std::stod(cells[5]), BandwidthCostKb(r, n, round, 0.3, true));
    EXPECT_EQ(std::stod(cells[6]), BandwidthCostKb(r, n, round, 0.3, true));
    EXPECT_FALSE(cells[7].empty());
  }
}

TEST_F(CliTest, SweepRejectsEmptyRatioList) {
  const std::string config = Write(SmallConfig("fl-top"));
  EXPECT_EQ(Run({"sweep", config, "--ratios", ","}), kExitUsage);
  EXPECT_EQ(Run({"sweep", config, "--ratios", "0.1,1.5"}), kExitUsage);
}

TEST_F(CliTest, SelectTopkFileCanPinARun) {
  const std::string config = Write(SmallConfig("fl-top"));
  const std::string index = (dir_ / "topk.txt").string();
  ASSERT_EQ(Run({"select-topk", config, "-o", index}), kExitOk) << err_.str();

  json pinned = SmallConfig("fl-top");
  pinned["index_file"] = index;
  ASSERT_EQ(Run({"run", Write(pinned, "pinned.json"), "--output-dir",
                 (dir_ / "pinned").string()}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(Run({"run", config, "--output-dir", (dir_ / "plain").string()}), kExitOk);
  EXPECT_EQ(Slurp(dir_ / "pinned" / "trace.csv"), Slurp(dir_ / "plain" / "trace.csv"));
}

TEST_F(CliTest, CalibratePrintsPositiveSensitivity) {
  ASSERT_EQ(Run({"calibrate", Write(SmallConfig("fl-basic"))}), kExitOk) << err_.str();
  std::istringstream in(out_.str());
  std::string key;
  double s = 0.0;
  in >> key >> s;
  EXPECT_EQ(key, "sensitivity");
  EXPECT_GT(s, 0.0);
}

TEST_F(CliTest, IdxDatasetRunsAsMulticlass) {
  // Three classes told apart by which third of a 4x4 image is bright.
  auto write = [&](const std::string& stem, std::size_t rows, std::uint32_t seed) {
    data::IdxTensor images{{static_cast<std::uint32_t>(rows), 4, 4}, {}};
    data::IdxTensor labels{{static_cast<std::uint32_t>(rows)}, {}};
    std::uint32_t state = seed;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::uint8_t label = static_cast<std::uint8_t>(r % 3);
      labels.bytes.push_back(label);
      for (std::size_t px = 0; px < 16; ++px) {
        state = state * 1664525u + 1013904223u;
        const bool lit = px * 3 / 16 == label;
        images.bytes.push_back(static_cast<std::uint8_t>((lit ? 160 : 0) + (state >> 27)));
      }
    }
    data::WriteIdx(dir_ / (stem + "-images"), images);
    data::WriteIdx(dir_ / (stem + "-labels"), labels);
  };
  write("train", 300, 1);
  write("test", 60, 2);
  json c = SmallConfig("fl-top");
  c["dataset"] = {{"fashion_mnist",
                   {{"train_images", "train-images"},
                    {"train_labels", "train-labels"},
                    {"test_images", "test-images"},
                    {"test_labels", "test-labels"}}},
                  {"public_size", 20}};
  c["federation"]["rounds"] = 8;
  ASSERT_EQ(Run({"run", Write(c), "--output-dir", (dir_ / "out").string()}), kExitOk)
      << err_.str();
  const json summary = json::parse(Slurp(dir_ / "out" / "summary.json"));
  EXPECT_EQ(summary["metric"], "accuracy");
  EXPECT_TRUE(summary["final"]["auroc"].is_null());
  EXPECT_GT(summary["best"].get<double>(), 0.5);
}

TEST_F(CliTest, ShippedConfigsParse) {
  for (const char* name : {"synthetic_fl_top.json", "synthetic_fl_top_dp.json"}) {
    const ExperimentConfig c =
        LoadExperimentConfig(fs::path(FLTOP_SOURCE_DIR) / "configs" / name);
    EXPECT_EQ(c.federation.num_clients, 50u) << name;
  }
}

}  // namespace
}  // namespace fltop::cli
