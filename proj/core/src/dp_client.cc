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

#include "fltop/dp_client.h"

#include "fltop/error.h"
#include "fltop/privacy.h"

namespace fltop {

DpMessage BuildDpMessage(const CompressedUpdate& update,
                         const DpMessageParams& params,
                         const secagg::FixedPointCodec& codec,
                         const secagg::ClientMask& mask,
                         std::uint64_t noise_seed) {
  Require(mask.residues.size() == update.size(), ErrorCode::kDimension,
          "mask length does not match the update length");
  const CompressedUpdate clipped = privacy::Clip(update, params.sensitivity);
  const CompressedUpdate noised =
      privacy::AddClientNoise(clipped, params.sensitivity,
                              params.noise_multiplier, params.cohort_size,
                              noise_seed);
  secagg::EncodeResult encoded = codec.Encode(noised.values);
  return {secagg::Encrypt(encoded.residues, mask), encoded.clamp_count};
}

}  // namespace fltop
