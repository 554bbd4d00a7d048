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

#include "fltop/sensitivity.h"

#include <algorithm>
#include <vector>

#include "fltop/error.h"
#include "fltop/privacy.h"
#include "fltop/random.h"

namespace fltop::privacy {
namespace {

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

double CalibrateSensitivity(const nn::ArchSpec& arch,
                            std::span<const double> w0,
                            const Dataset& public_data,
                            const IndexSource& source, bool reinit_nonselected,
                            const nn::SgdOptions& options, int trials,
                            std::uint64_t seed) {
  Require(trials >= 1, ErrorCode::kConfiguration, "trials must be >= 1");
  const std::uint64_t batch_seed = DeriveSeed(seed, StreamTag::kCalibration);
  if (const auto* fixed = std::get_if<IndexSet>(&source)) {
    Require(trials == 1, ErrorCode::kConfiguration,
            "a fixed index set is calibrated with a single trial");
    return L2Norm(LocalUpdate(arch, public_data, w0, *fixed, reinit_nonselected,
                              options, batch_seed));
  }
  const std::size_t k = std::get<RandomIndexDraw>(source).k;
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const IndexSet set = SelectRandom(
        arch.parameter_count(), k,
        DeriveSeed(seed, StreamTag::kCalibration, {static_cast<std::uint64_t>(t)}));
    norms.push_back(L2Norm(LocalUpdate(arch, public_data, w0, set,
                                       reinit_nonselected, options, batch_seed)));
  }
  return Median(std::move(norms));
}

}  // namespace fltop::privacy
