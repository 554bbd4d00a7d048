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

#ifndef FLTOP_SENSITIVITY_H_
#define FLTOP_SENSITIVITY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>

#include "fltop/compression.h"
#include "fltop/dataset.h"
#include "fltop/index_set.h"
#include "fltop/nn.h"

namespace fltop::privacy {

// A fresh uniform K-subset per trial, for schemes that redraw their
// coordinates every round.
struct RandomIndexDraw {
  std::size_t k = 0;
};

using IndexSource = std::variant<IndexSet, RandomIndexDraw>;

inline constexpr int kRandomSchemeTrials = 100;

// Clipping threshold from one simulated local round on public data: the L2
// norm of the retained update after options.steps SGD iterations from w0. For
// a fixed IndexSet `trials` must be 1; for RandomIndexDraw the result is the
// median over `trials` independently drawn sets.
double CalibrateSensitivity(const nn::ArchSpec& arch,
                            std::span<const double> w0,
                            const Dataset& public_data,
                            const IndexSource& source, bool reinit_nonselected,
                            const nn::SgdOptions& options, int trials,
                            std::uint64_t seed);

}  // namespace fltop::privacy

#endif  // FLTOP_SENSITIVITY_H_
