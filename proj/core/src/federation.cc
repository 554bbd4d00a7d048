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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fltop/bandwidth.h"
#include "fltop/compression.h"
#include "fltop/dp_client.h"
#include "fltop/error.h"
#include "fltop/metrics.h"
#include "fltop/random.h"
#include "fltop/secure_agg.h"
#include "fltop/sensitivity.h"

namespace fltop {
namespace {

using Updates = std::vector<CompressedUpdate>;

std::uint64_t ClientSeed(const FederationContext& ctx, int round,
                         std::size_t client) {
  return DeriveSeed(ctx.config.seeds.sampling, StreamTag::kLocalTraining,
                    {static_cast<std::uint64_t>(round), client});
}

// Model a client starts from. For a fixed set the client rebuilds it from the
// K received values and w0.
Vector ClientStart(const FederationContext& ctx, const FederationState& state,
                   const IndexSet& set) {
  const SchemeSpec& s = ctx.config.scheme;
  if (s.selection != Selection::kAll && s.fixed_across_rounds) {
    return Expand(Compress(state.global, set), set, ctx.w0);
  }
  return state.global;
}

// global[set[j]] += sum_k weights[k] * updates[k][j], in cohort order.
void ApplyWeighted(const IndexSet& set, const Updates& updates,
                   std::span<const double> weights, Vector& global) {
  std::vector<double> total(set.size(), 0.0);
  for (std::size_t c = 0; c < updates.size(); ++c) {
    const std::vector<double>& u = updates[c].values;
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += weights[c] * u[j];
  }
  const auto idx = set.indices();
  for (std::size_t j = 0; j < idx.size(); ++j) global[idx[j]] += total[j];
}

void BeginRound(const IndexSet& set, FederationState& state) {
  ++state.round;
  for (std::size_t i : set.indices()) state.ever_selected[i] = true;
  state.round_set = set;
  state.upload_lengths.clear();
  state.clamp_count = 0;
}

Updates LocalUpdates(const FederationContext& ctx, const FederationState& state,
                     std::span<const std::size_t> cohort, const IndexSet& set,
                     int round) {
  const Vector start = ClientStart(ctx, state, set);
  const bool reinit = ctx.config.scheme.selection != Selection::kAll &&
                      ctx.config.scheme.reinit_nonselected;
  Updates updates;
  updates.reserve(cohort.size());
  for (std::size_t c : cohort) {
    updates.push_back(LocalUpdate(ctx.arch, ctx.data.clients[c], start, set,
                                  reinit, ctx.config.local,
                                  ClientSeed(ctx, round, c)));
  }
  return updates;
}

void RunPlain(const FederationContext& ctx, FederationState& state,
              bool size_weighted) {
  const int round = state.round + 1;
  const IndexSet set = RoundIndexSet(ctx, round);
  const std::vector<std::size_t> cohort = SampleCohort(ctx, round);
  const Updates updates = LocalUpdates(ctx, state, cohort, set, round);

  std::vector<double> weights(cohort.size());
  if (size_weighted) {
    double total = 0.0;
    for (std::size_t c : cohort) total += static_cast<double>(ctx.data.clients[c].size());
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      weights[i] = static_cast<double>(ctx.data.clients[cohort[i]].size()) / total;
    }
  } else {
    std::fill(weights.begin(), weights.end(),
              1.0 / static_cast<double>(cohort.size()));
  }

  BeginRound(set, state);
  for (const CompressedUpdate& u : updates) state.upload_lengths.push_back(u.size());
  ApplyWeighted(set, updates, weights, state.global);
}

void RunPrivate(const FederationContext& ctx, FederationState& state) {
  const int round = state.round + 1;
  const IndexSet set = RoundIndexSet(ctx, round);
  const std::vector<std::size_t> cohort = SampleCohort(ctx, round);
  const std::size_t m = cohort.size();
  Require(m >= 2, ErrorCode::kConfiguration,
          "secure aggregation needs a cohort of at least two clients");
  const Updates updates = LocalUpdates(ctx, state, cohort, set, round);

  const secagg::FixedPointCodec codec(ctx.config.frac_bits, 64, m,
                                      secagg::OverflowPolicy::kClamp);
  const secagg::MaskSet masks = secagg::MakeMasks(
      m, set.size(),
      DeriveSeed(ctx.config.seeds.masks, StreamTag::kMasks,
                 {static_cast<std::uint64_t>(round)}));
  const DpMessageParams params{ctx.sensitivity, ctx.config.noise_multiplier, m};

  std::vector<secagg::MaskedUpdate> inbox;
  inbox.reserve(m);
  std::size_t clamps = 0;
  for (std::size_t slot = 0; slot < m; ++slot) {
    DpMessage msg = BuildDpMessage(
        updates[slot], params, codec, masks.masks[slot],
        DeriveSeed(ctx.config.seeds.noise, StreamTag::kNoise,
                   {static_cast<std::uint64_t>(round), cohort[slot]}));
    clamps += msg.clamp_count;
    inbox.push_back(std::move(msg.masked));
  }

  // Server side: only the masked messages are visible from here on.
  std::vector<double> total;
  try {
    total = secagg::AggregateDecode(inbox, codec);
  } catch (const Error& e) {
    throw Error(e.code(), "round " + std::to_string(round) + ": " + e.what());
  }

  BeginRound(set, state);
  for (const secagg::MaskedUpdate& u : inbox) {
    state.upload_lengths.push_back(u.residues.size());
  }
  state.clamp_count = clamps;
  const auto idx = set.indices();
  const double denom = static_cast<double>(m);
  for (std::size_t j = 0; j < idx.size(); ++j) state.global[idx[j]] += total[j] / denom;
}

}  // namespace

std::size_t FederationConfig::CohortSize() const {
  return static_cast<std::size_t>(
      std::llround(sampling * static_cast<double>(num_clients)));
}

void FederationConfig::Validate() const {
  auto check = [](bool ok, const std::string& what) {
    Require(ok, ErrorCode::kConfiguration, what);
  };
  check(num_clients >= 1, "num_clients must be >= 1");
  check(sampling > 0.0 && sampling <= 1.0, "sampling must lie in (0, 1]");
  check(CohortSize() >= 1, "round(sampling * num_clients) must be >= 1");
  check(rounds >= 0, "rounds must be >= 0");
  check(local.steps >= 1, "local steps must be >= 1");
  check(std::isfinite(local.learning_rate) && local.learning_rate >= 0.0,
        "learning_rate must be finite and nonnegative");
  check(local.batch_size >= 1, "batch_size must be >= 1");
  check(scheme.selection == Selection::kAll || (ratio > 0.0 && ratio <= 1.0),
        "ratio must lie in (0, 1]");
  check(init_steps >= 1, "init_steps must be >= 1");
  if (scheme.dp) {
    check(std::isfinite(noise_multiplier) && noise_multiplier > 0.0,
          "noise_multiplier must be positive");
    check(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    check(!sensitivity || (std::isfinite(*sensitivity) && *sensitivity > 0.0),
          "sensitivity must be positive");
    check(CohortSize() >= 2, "private schemes need at least two clients per round");
    check(frac_bits >= 1 && frac_bits < 64 - 8, "frac_bits must lie in [1, 55]");
    check(lambda_max >= 1, "lambda_max must be >= 1");
  }
}

FederationContext PrepareFederation(const nn::ArchSpec& arch,
                                    FederationConfig config,
                                    FederationData data,
                                    const IndexSet* pinned) {
  config.Validate();
  Require(data.clients.size() == config.num_clients, ErrorCode::kConfiguration,
          "expected " + std::to_string(config.num_clients) + " client datasets, got " +
              std::to_string(data.clients.size()));
  for (const Dataset& d : data.clients) {
    Require(d.size() > 0, ErrorCode::kData, "every client needs at least one sample");
    Require(d.feature_count() == arch.input_width(), ErrorCode::kDimension,
            "client features do not match the model input width");
  }
  const std::size_t n = arch.parameter_count();
  Vector w0 = nn::InitModel(arch, config.seeds.model);
  const SchemeSpec& s = config.scheme;
  const std::size_t k =
      s.selection == Selection::kAll ? n : RetainedCount(config.ratio, n);

  IndexSet fixed;
  if (pinned != nullptr) {
    Require(s.selection != Selection::kAll && s.fixed_across_rounds,
            ErrorCode::kConfiguration,
            "an index file can only be pinned for fixed-set schemes");
    Require(pinned->dimension() == n && pinned->size() == k,
            ErrorCode::kConfiguration,
            "pinned index set must hold " + std::to_string(k) + " of " +
                std::to_string(n) + " coordinates");
    fixed = *pinned;
  } else if (s.selection == Selection::kAll) {
    fixed = IndexSet::All(n);
  } else if (s.selection == Selection::kTopK) {
    Require(data.public_data.size() > 0, ErrorCode::kData,
            "Top-K selection needs public data");
    fixed = SelectTopK(arch, w0, nn::MakeBatch(arch, data.public_data),
                       config.init_steps, k, config.local.learning_rate);
  } else if (s.fixed_across_rounds) {
    fixed = SelectRandom(n, k,
                         DeriveSeed(config.seeds.sampling, StreamTag::kFixedIndexSet));
  }

  double sensitivity = 0.0;
  std::optional<privacy::MomentsAccountant> accountant;
  if (s.dp) {
    if (config.sensitivity) {
      sensitivity = *config.sensitivity;
    } else {
      Require(data.public_data.size() > 0, ErrorCode::kData,
              "sensitivity calibration needs public data");
      const bool per_round = s.selection == Selection::kRandom && !s.fixed_across_rounds;
      const privacy::IndexSource source =
          per_round ? privacy::IndexSource(privacy::RandomIndexDraw{k})
                    : privacy::IndexSource(fixed);
      sensitivity = privacy::CalibrateSensitivity(
          arch, w0, data.public_data, source,
          s.selection != Selection::kAll && s.reinit_nonselected, config.local,
          per_round ? privacy::kRandomSchemeTrials : 1,
          DeriveSeed(config.seeds.sampling, StreamTag::kCalibration));
      Require(sensitivity > 0.0, ErrorCode::kNumeric,
              "calibrated sensitivity is zero; set it explicitly");
    }
    accountant.emplace(config.noise_multiplier, config.sampling, config.lambda_max);
  }
  return FederationContext{arch,      std::move(config), std::move(data), std::move(w0), k,
                           std::move(fixed), sensitivity, std::move(accountant)};
}

FederationState InitialState(const FederationContext& ctx) {
  FederationState state;
  state.global = ctx.w0;
  state.round_set = IndexSet::Empty(ctx.w0.size());
  state.ever_selected.assign(ctx.w0.size(), false);
  return state;
}

std::vector<std::size_t> SampleCohort(const FederationContext& ctx, int round) {
  const std::size_t m = ctx.config.CohortSize();
  Rng rng = MakeStream(ctx.config.seeds.sampling, StreamTag::kCohort,
                       {static_cast<std::uint64_t>(round)});
  return SampleIndices(ctx.config.num_clients, m, rng);
}

IndexSet RoundIndexSet(const FederationContext& ctx, int round) {
  const SchemeSpec& s = ctx.config.scheme;
  if (s.selection == Selection::kRandom && !s.fixed_across_rounds) {
    return SelectRandom(ctx.w0.size(), ctx.k,
                        DeriveSeed(ctx.config.seeds.sampling, StreamTag::kRoundIndexSet,
                                   {static_cast<std::uint64_t>(round)}));
  }
  return ctx.fixed_set;
}

void RunRoundStd(const FederationContext& ctx, FederationState& state) {
  RunPlain(ctx, state, /*size_weighted=*/true);
}

void RunRoundStdDp(const FederationContext& ctx, FederationState& state) {
  RunPrivate(ctx, state);
}

void RunRoundPruned(const FederationContext& ctx, FederationState& state) {
  RunPlain(ctx, state, /*size_weighted=*/false);
}

void RunRoundPrunedDp(const FederationContext& ctx, FederationState& state) {
  RunPrivate(ctx, state);
}

void RunRound(const FederationContext& ctx, FederationState& state) {
  const SchemeSpec& s = ctx.config.scheme;
  if (s.selection == Selection::kAll) {
    s.dp ? RunRoundStdDp(ctx, state) : RunRoundStd(ctx, state);
  } else {
    s.dp ? RunRoundPrunedDp(ctx, state) : RunRoundPruned(ctx, state);
  }
}

Evaluation Evaluate(const nn::ArchSpec& arch, std::span<const double> w,
                    const Dataset& test) {
  Require(test.size() > 0, ErrorCode::kData, "empty test set");
  const Matrix p = nn::Predict(arch, w, test.inputs);
  std::vector<int> predicted(test.size());
  Evaluation e;
  if (p.cols() == 1) {
    std::vector<double> scores(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      scores[i] = p(static_cast<Eigen::Index>(i), 0);
      predicted[i] = scores[i] >= 0.5 ? 1 : 0;
    }
    const bool both = std::ranges::count(test.labels, 1) > 0 &&
                      std::ranges::count(test.labels, 0) > 0;
    e.auroc = both ? metrics::Auroc(scores, test.labels)
                   : std::numeric_limits<double>::quiet_NaN();
  } else {
    for (std::size_t i = 0; i < test.size(); ++i) {
      Eigen::Index best = 0;
      p.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
      predicted[i] = static_cast<int>(best);
    }
    e.auroc = std::numeric_limits<double>::quiet_NaN();
  }
  e.accuracy = metrics::Accuracy(predicted, test.labels);
  e.balanced_accuracy = metrics::BalancedAccuracy(predicted, test.labels);
  return e;
}

std::vector<RoundMetrics> RunExperiment(const FederationContext& ctx,
                                        FederationState* final_state) {
  FederationState state = InitialState(ctx);
  const FederationConfig& cfg = ctx.config;
  const std::size_t n = ctx.w0.size();
  const double r = static_cast<double>(ctx.k) / static_cast<double>(n);
  const bool down_compressed = DownstreamCompressed(cfg.scheme);
  std::vector<RoundMetrics> trace;
  trace.reserve(static_cast<std::size_t>(cfg.rounds));
  for (int t = 1; t <= cfg.rounds; ++t) {
    RunRound(ctx, state);
    const Evaluation e = Evaluate(ctx.arch, state.global, ctx.data.test);
    RoundMetrics m;
    m.round = t;
    m.accuracy = e.accuracy;
    m.balanced_accuracy = e.balanced_accuracy;
    m.auroc = e.auroc;
    m.down_kb = BandwidthCostKb(r, n, t, cfg.sampling, down_compressed);
    m.up_kb = BandwidthCostKb(r, n, t, cfg.sampling, true);
    if (ctx.accountant) m.epsilon = ctx.accountant->Epsilon(t, cfg.delta).epsilon;
    m.clamps = state.clamp_count;
    trace.push_back(m);
  }
  if (final_state != nullptr) *final_state = std::move(state);
  return trace;
}

RunSummary Summarize(std::span<const RoundMetrics> trace, int num_classes) {
  Require(!trace.empty(), ErrorCode::kData, "cannot summarize an empty trace");
  const bool binary = num_classes == 2;
  auto metric = [binary](const RoundMetrics& m) {
    return binary ? m.balanced_accuracy : m.accuracy;
  };
  const RoundMetrics* best = &trace.front();
  for (const RoundMetrics& m : trace) {
    if (metric(m) > metric(*best)) best = &m;
  }
  return {binary ? "balanced_accuracy" : "accuracy", metric(*best), *best};
}

}  // namespace fltop
