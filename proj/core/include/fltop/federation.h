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

#ifndef FLTOP_FEDERATION_H_
#define FLTOP_FEDERATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fltop/accountant.h"
#include "fltop/dataset.h"
#include "fltop/index_set.h"
#include "fltop/nn.h"
#include "fltop/scheme.h"

namespace fltop {

struct Seeds {
  std::uint64_t model = 1;     // w0
  std::uint64_t sampling = 2;  // cohorts, local batches, index sets
  std::uint64_t noise = 3;     // client Gaussian noise
  std::uint64_t masks = 4;     // secure-aggregation masks
};

struct FederationConfig {
  SchemeSpec scheme;
  std::size_t num_clients = 50;  // N
  double sampling = 0.2;         // C
  int rounds = 50;               // T_cl
  nn::SgdOptions local;          // T_gd, eta, batch size
  double ratio = 0.05;           // r = K / n; ignored when selection is all
  int init_steps = 5;            // T_init for Top-K selection
  double noise_multiplier = 1.0;  // sigma
  double delta = privacy::kDefaultDelta;
  std::optional<double> sensitivity;  // S; calibrated on public data if unset
  int frac_bits = 32;
  int lambda_max = privacy::kDefaultLambdaMax;
  Seeds seeds;

  // |K| = round(C * N).
  std::size_t CohortSize() const;
  // Throws a configuration error describing the first invalid field.
  void Validate() const;
};

struct FederationData {
  std::vector<Dataset> clients;
  Dataset test;
  Dataset public_data;
};

// Everything fixed before the first round.
struct FederationContext {
  nn::ArchSpec arch;
  FederationConfig config;
  FederationData data;
  Vector w0;
  std::size_t k = 0;            // retained coordinates per message
  IndexSet fixed_set;           // empty for per-round random schemes
  double sensitivity = 0.0;     // S, DP schemes only
  std::optional<privacy::MomentsAccountant> accountant;
};

// Selects the fixed index set (unless `pinned` is given), calibrates S for
// DP schemes without an explicit value and builds the accountant.
FederationContext PrepareFederation(const nn::ArchSpec& arch,
                                    FederationConfig config,
                                    FederationData data,
                                    const IndexSet* pinned = nullptr);

struct FederationState {
  int round = 0;
  Vector global;
  IndexSet round_set;                 // coordinates exchanged last round
  std::vector<bool> ever_selected;    // union of all index sets so far
  std::vector<std::size_t> upload_lengths;  // per client, last round
  std::size_t clamp_count = 0;        // last round
};

FederationState InitialState(const FederationContext& ctx);

// One communication round. Dispatches on the scheme.
void RunRound(const FederationContext& ctx, FederationState& state);

// Per-scheme rounds, exposed for tests.
void RunRoundStd(const FederationContext& ctx, FederationState& state);
void RunRoundStdDp(const FederationContext& ctx, FederationState& state);
void RunRoundPruned(const FederationContext& ctx, FederationState& state);
void RunRoundPrunedDp(const FederationContext& ctx, FederationState& state);

// Clients of round `round` (1-based), sampled without replacement.
std::vector<std::size_t> SampleCohort(const FederationContext& ctx, int round);

// Coordinates exchanged in round `round`.
IndexSet RoundIndexSet(const FederationContext& ctx, int round);

struct Evaluation {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double auroc = 0.0;  // NaN for multiclass tasks or a single-class test set
};

Evaluation Evaluate(const nn::ArchSpec& arch, std::span<const double> w,
                    const Dataset& test);

struct RoundMetrics {
  int round = 0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double auroc = 0.0;
  double down_kb = 0.0;  // cumulative per-client averages
  double up_kb = 0.0;
  std::optional<double> epsilon;  // DP runs only
  std::size_t clamps = 0;
};

// Runs config.rounds rounds and evaluates the global model after each.
std::vector<RoundMetrics> RunExperiment(const FederationContext& ctx,
                                        FederationState* final_state = nullptr);

struct RunSummary {
  std::string metric;  // "balanced_accuracy" (binary) or "accuracy"
  double best = 0.0;
  RoundMetrics at_best;
};

// Best round by balanced accuracy for binary tasks and accuracy otherwise;
// ties go to the earliest round. Throws a data error for an empty trace.
RunSummary Summarize(std::span<const RoundMetrics> trace, int num_classes);

}  // namespace fltop

#endif  // FLTOP_FEDERATION_H_
