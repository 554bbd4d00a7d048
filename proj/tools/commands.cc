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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "experiment_config.h"
#include "fltop/accountant.h"
#include "fltop/bandwidth.h"
#include "fltop/error.h"
#include "fltop/federation.h"
#include "fltop/index_set.h"
#include "fltop/report.h"
#include "fltop/scheme.h"

namespace fltop::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json NumberOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

struct LoadedRun {
  ExperimentConfig config;
  nn::ArchSpec arch;
  FederationData data;
};

LoadedRun Load(const ExperimentConfig& config) {
  FederationData data = LoadFederationData(config);
  const Dataset& probe = data.clients.front();
  nn::ArchSpec arch = BuildArch(config, probe.feature_count(), probe.num_classes);
  return {config, std::move(arch), std::move(data)};
}

FederationContext Prepare(const LoadedRun& run) {
  std::optional<IndexSet> pinned;
  if (run.config.index_file) {
    pinned = ReadIndexFile(*run.config.index_file, run.arch.parameter_count());
  }
  return PrepareFederation(run.arch, run.config.federation, run.data,
                           pinned ? &*pinned : nullptr);
}

void CheckBudget(const ExperimentConfig& config, const nn::ArchSpec& arch,
                 bool full_scale) {
  const double work = EstimatedWork(config, arch.parameter_count());
  if (!full_scale && work > kDeskScaleWork) {
    std::ostringstream msg;
    msg << "estimated local training work " << work
        << " multiply-adds exceeds the desk-scale budget " << kDeskScaleWork
        << "; pass --full-scale to run anyway";
    throw ConfigError(msg.str());
  }
}

struct RunOutcome {
  FederationContext ctx;
  std::vector<RoundMetrics> trace;
  RunSummary summary;
};

RunOutcome Execute(const LoadedRun& run) {
  FederationContext ctx = Prepare(run);
  std::vector<RoundMetrics> trace = RunExperiment(ctx);
  RunSummary summary = Summarize(trace, run.data.test.num_classes);
  return {std::move(ctx), std::move(trace), std::move(summary)};
}

json SummaryJson(const ExperimentConfig& config, const RunOutcome& r) {
  const RoundMetrics& b = r.summary.at_best;
  const RoundMetrics& last = r.trace.back();
  json j = {
      {"scheme", config.scheme},
      {"parameters", r.ctx.w0.size()},
      {"k", r.ctx.k},
      {"ratio", static_cast<double>(r.ctx.k) / static_cast<double>(r.ctx.w0.size())},
      {"rounds", r.trace.size()},
      {"metric", r.summary.metric},
      {"best", r.summary.best},
      {"best_round", b.round},
      {"at_best",
       {{"accuracy", b.accuracy},
        {"balanced_accuracy", b.balanced_accuracy},
        {"auroc", NumberOrNull(b.auroc)},
        {"down_kb", b.down_kb},
        {"up_kb", b.up_kb},
        {"epsilon", b.epsilon ? NumberOrNull(*b.epsilon) : json(nullptr)}}},
      {"final",
       {{"accuracy", last.accuracy},
        {"balanced_accuracy", last.balanced_accuracy},
        {"auroc", NumberOrNull(last.auroc)},
        {"down_kb", last.down_kb},
        {"up_kb", last.up_kb},
        {"epsilon", last.epsilon ? NumberOrNull(*last.epsilon) : json(nullptr)}}},
  };
  if (config.federation.scheme.dp) {
    std::size_t clamps = 0;
    for (const RoundMetrics& m : r.trace) clamps += m.clamps;
    j["sensitivity"] = r.ctx.sensitivity;
    j["total_clamps"] = clamps;
  }
  return j;
}

void WriteRunOutputs(const fs::path& dir, const ExperimentConfig& config,
                     const RunOutcome& r) {
  fs::create_directories(dir);
  std::ostringstream trace;
  WriteTraceCsv(trace, r.trace);
  WriteText(dir / "trace.csv", trace.str());
  WriteText(dir / "summary.json", SummaryJson(config, r).dump(2) + "\n");
  WriteText(dir / "resolved_config.json", ResolvedConfigJson(config).dump(2) + "\n");
}

int CmdRun(const std::string& config_path, const std::string& output_dir,
           bool full_scale, std::ostream& out) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  const LoadedRun run = Load(config);
  CheckBudget(config, run.arch, full_scale);
  const RunOutcome r = Execute(run);
  WriteRunOutputs(config.output_dir, config, r);
  out << config.scheme << ": best " << r.summary.metric << " "
      << FormatNumber(r.summary.best) << " at round " << r.summary.at_best.round
      << "; outputs in " << config.output_dir.string() << "\n";
  return kExitOk;
}

std::string RatioLabel(double ratio) { return "ratio_" + FormatNumber(ratio); }

int CmdSweep(const std::string& config_path, const std::string& ratios_text,
             const std::string& output_dir, bool full_scale, std::ostream& out,
             std::ostream& err) {
  const std::vector<double> ratios = ParseRatioList(ratios_text, err);
  if (ratios.empty()) throw ConfigError("--ratios lists no compression ratios");
  ExperimentConfig base = LoadExperimentConfig(config_path);
  if (!output_dir.empty()) base.output_dir = output_dir;
  for (double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) {
      throw ConfigError("ratio " + FormatNumber(r) + " is outside (0, 1]");
    }
  }
  const LoadedRun loaded = Load(base);
  CheckBudget(base, loaded.arch, full_scale);
  fs::create_directories(base.output_dir);
  WriteText(base.output_dir / "resolved_config.json",
            ResolvedConfigJson(base).dump(2) + "\n");

  const double sampling = base.federation.sampling;
  const bool down_compressed = DownstreamCompressed(base.federation.scheme);
  std::ostringstream table;
  table << "ratio,scheme,metric,best,round,down_kb,up_kb,epsilon\n";
  for (double ratio : ratios) {
    LoadedRun run = loaded;
    run.config.federation.ratio = ratio;
    const RunOutcome r = Execute(run);
    WriteRunOutputs(base.output_dir / RatioLabel(ratio), run.config, r);
    const RoundMetrics& b = r.summary.at_best;
    const double actual = static_cast<double>(r.ctx.k) / static_cast<double>(r.ctx.w0.size());
    const std::size_t n = r.ctx.w0.size();
    table << FormatNumber(ratio) << ',' << base.scheme << ',' << r.summary.metric
          << ',' << FormatNumber(r.summary.best) << ',' << b.round << ','
          << FormatNumber(BandwidthCostKb(actual, n, b.round, sampling, down_compressed))
          << ',' << FormatNumber(BandwidthCostKb(actual, n, b.round, sampling, true))
          << ',' << (b.epsilon ? FormatNumber(*b.epsilon) : std::string()) << '\n';
    out << base.scheme << " ratio " << FormatNumber(ratio) << ": best "
        << r.summary.metric << " " << FormatNumber(r.summary.best) << " at round "
        << b.round << "\n";
  }
  WriteText(base.output_dir / "sweep.csv", table.str());
  out << "summary table in " << (base.output_dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

int CmdAccountant(double sigma, double sampling, int rounds, double delta,
                  int lambda_max, std::ostream& out) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("--sigma must be > 0");
  if (!(sampling > 0.0 && sampling <= 1.0)) {
    throw ConfigError("--sampling must lie in (0, 1]");
  }
  if (rounds < 1) throw ConfigError("--rounds must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");
  if (lambda_max < 1) throw ConfigError("--lambda-max must be >= 1");
  const privacy::EpsilonResult r =
      privacy::Epsilon({sigma, sampling, rounds, delta, lambda_max});
  std::ostringstream eps;
  eps.precision(6);
  eps << r.epsilon;
  out << "epsilon " << eps.str() << "\nlambda " << r.lambda << "\n";
  return kExitOk;
}

int CmdCalibrate(const std::string& config_path, std::ostream& out) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  config.federation.scheme.dp = true;
  config.federation.sensitivity.reset();
  const LoadedRun run = Load(config);
  const FederationContext ctx = Prepare(run);
  out << "sensitivity " << FormatNumber(ctx.sensitivity) << "\n";
  return kExitOk;
}

int CmdSelectTopk(const std::string& config_path, const std::string& output,
                  std::ostream& out) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  config.federation.scheme = SchemeByName("fl-top");
  config.index_file.reset();
  const LoadedRun run = Load(config);
  const FederationContext ctx = Prepare(run);
  const fs::path path = output;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  WriteIndexFile(path, ctx.fixed_set);
  out << "selected " << ctx.fixed_set.size() << " of " << ctx.w0.size()
      << " coordinates into " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

std::vector<double> ParseRatioList(const std::string& text, std::ostream& err) {
  std::vector<double> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size()) {
      throw ConfigError("cannot parse ratio '" + std::string(item) + "'");
    }
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      err << "warning: duplicate ratio " << FormatNumber(v) << " ignored\n";
      continue;
    }
    out.push_back(v);
  }
  return out;
}

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Federated learning with fixed Top-K weight pruning"};
  app.name("fltop");
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  bool full_scale = false;

  CLI::App* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--output-dir", output_dir, "Overrides output_dir of the config");
  run->add_flag("--full-scale", full_scale, "Lift the desk-scale work budget");

  std::string ratios;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run the config once per compression ratio");
  sweep->add_option("config", config_path, "Experiment config file")->required();
  sweep->add_option("--ratios", ratios, "Comma-separated ratios, e.g. 0.005,0.05,0.1")
      ->required();
  sweep->add_option("--output-dir", output_dir, "Overrides output_dir of the config");
  sweep->add_flag("--full-scale", full_scale, "Lift the desk-scale work budget");

  double sigma = 0.0;
  double sampling = 0.0;
  int rounds = 0;
  double delta = privacy::kDefaultDelta;
  int lambda_max = privacy::kDefaultLambdaMax;
  CLI::App* acc = app.add_subcommand("accountant", "Privacy budget after T rounds");
  acc->add_option("--sigma", sigma, "Noise multiplier")->required();
  acc->add_option("--sampling", sampling, "Client sampling probability C")->required();
  acc->add_option("--rounds", rounds, "Number of rounds T")->required();
  acc->add_option("--delta", delta, "Target delta")->capture_default_str();
  acc->add_option("--lambda-max", lambda_max, "Largest moment order")
      ->capture_default_str();

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Clipping threshold from the public batch");
  calibrate->add_option("config", config_path, "Experiment config file")->required();

  std::string index_output;
  CLI::App* select =
      app.add_subcommand("select-topk", "Write the Top-K index set of a config");
  select->add_option("config", config_path, "Experiment config file")->required();
  select->add_option("-o,--output", index_output, "Index file to write")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("fltop");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return CmdRun(config_path, output_dir, full_scale, out);
    if (*sweep) return CmdSweep(config_path, ratios, output_dir, full_scale, out, err);
    if (*acc) return CmdAccountant(sigma, sampling, rounds, delta, lambda_max, out);
    if (*calibrate) return CmdCalibrate(config_path, out);
    if (*select) return CmdSelectTopk(config_path, index_output, out);
  } catch (const ConfigError& e) {
    err << "fltop: configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "fltop: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfiguration ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "fltop: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fltop::cli
