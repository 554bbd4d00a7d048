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

#ifndef FLTOP_PRIVACY_H_
#define FLTOP_PRIVACY_H_

#include <cstddef>
#include <cstdint>

#include "fltop/compression.h"

namespace fltop::privacy {

// Scales `update` by 1 / max(1, ||update||_2 / sensitivity). Updates already
// within the bound are returned unchanged, bit for bit.
CompressedUpdate Clip(const CompressedUpdate& update, double sensitivity);

// Per-client share of the Gaussian mechanism: i.i.d. N(0, (S*sigma)^2 /
// num_selected) per coordinate, so that num_selected shares sum to noise of
// standard deviation S*sigma.
CompressedUpdate AddClientNoise(const CompressedUpdate& update,
                                double sensitivity, double noise_multiplier,
                                std::size_t num_selected, std::uint64_t seed);

double L2Norm(const CompressedUpdate& update);

}  // namespace fltop::privacy

#endif  // FLTOP_PRIVACY_H_
