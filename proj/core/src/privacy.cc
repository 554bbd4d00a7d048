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

#include "fltop/privacy.h"

#include <cmath>
#include <random>

#include "fltop/error.h"
#include "fltop/random.h"

namespace fltop::privacy {
namespace {

// Rescaled vectors land within a few ulps of the threshold; treating those as
// in-bounds makes Clip idempotent.
constexpr double kNormSlack = 1e-14;

}  // namespace

double L2Norm(const CompressedUpdate& update) {
  double sum = 0.0;
  for (double v : update.values) sum += v * v;
  return std::sqrt(sum);
}

CompressedUpdate Clip(const CompressedUpdate& update, double sensitivity) {
  Require(std::isfinite(sensitivity) && sensitivity > 0.0,
          ErrorCode::kConfiguration, "clipping threshold must be positive and finite");
  const double norm = L2Norm(update);
  Require(std::isfinite(norm), ErrorCode::kNumeric, "update norm is not finite");
  if (norm <= sensitivity * (1.0 + kNormSlack)) return update;
  const double divisor = norm / sensitivity;
  CompressedUpdate out;
  out.values.reserve(update.size());
  for (double v : update.values) out.values.push_back(v / divisor);
  return out;
}

CompressedUpdate AddClientNoise(const CompressedUpdate& update,
                                double sensitivity, double noise_multiplier,
                                std::size_t num_selected, std::uint64_t seed) {
  Require(std::isfinite(sensitivity) && sensitivity > 0.0,
          ErrorCode::kConfiguration, "sensitivity must be positive and finite");
  Require(std::isfinite(noise_multiplier) && noise_multiplier > 0.0,
          ErrorCode::kConfiguration, "noise multiplier must be positive and finite");
  Require(num_selected >= 1, ErrorCode::kConfiguration,
          "at least one selected client is required");
  const double stddev =
      sensitivity * noise_multiplier / std::sqrt(static_cast<double>(num_selected));
  Rng rng = MakeStream(seed, StreamTag::kNoise);
  std::normal_distribution<double> noise(0.0, stddev);
  CompressedUpdate out = update;
  for (double& v : out.values) v += noise(rng);
  return out;
}

}  // namespace fltop::privacy
