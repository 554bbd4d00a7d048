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

#ifndef FLTOP_DP_CLIENT_H_
#define FLTOP_DP_CLIENT_H_

#include <cstddef>
#include <cstdint>

#include "fltop/compression.h"
#include "fltop/secure_agg.h"

namespace fltop {

struct DpMessageParams {
  double sensitivity = 1.0;       // S
  double noise_multiplier = 1.0;  // sigma
  std::size_t cohort_size = 2;    // |K|
};

// What a client transmits in a private round. The plaintext update never
// leaves BuildDpMessage.
struct DpMessage {
  secagg::MaskedUpdate masked;
  std::size_t clamp_count = 0;
};

// clip(S) -> add N(0, (S sigma)^2 / |K|) -> encode -> add mask.
DpMessage BuildDpMessage(const CompressedUpdate& update,
                         const DpMessageParams& params,
                         const secagg::FixedPointCodec& codec,
                         const secagg::ClientMask& mask,
                         std::uint64_t noise_seed);

}  // namespace fltop

#endif  // FLTOP_DP_CLIENT_H_
