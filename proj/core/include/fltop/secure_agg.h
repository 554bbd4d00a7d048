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

#ifndef FLTOP_SECURE_AGG_H_
#define FLTOP_SECURE_AGG_H_

// Additive-mask secure aggregation over the ring Z / 2^modulus_bits.
//
// Real vectors are quantized to fixed point with `frac_bits` fractional bits
// and stored as two's-complement residues. Every client adds its mask; the
// masks of one cohort sum to zero, so only the cohort total is recoverable.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fltop::secagg {

using Residue = std::uint64_t;

enum class OverflowPolicy {
  kClamp,  // saturate at +/- clamp_range and count
  kError,  // throw an overflow error naming the coordinate
};

struct EncodeResult {
  std::vector<Residue> residues;
  std::size_t clamp_count = 0;
};

class FixedPointCodec {
 public:
  // Values are kept within clamp_range = 2^(modulus_bits - frac_bits - 2) /
  // max_parties so that the sum of max_parties encodings never wraps.
  explicit FixedPointCodec(int frac_bits = 32, int modulus_bits = 64,
                           std::size_t max_parties = 1,
                           OverflowPolicy policy = OverflowPolicy::kClamp);

  int frac_bits() const { return frac_bits_; }
  int modulus_bits() const { return modulus_bits_; }
  std::size_t max_parties() const { return max_parties_; }
  double clamp_range() const { return clamp_range_; }
  Residue mask() const { return mask_; }

  // round(v * 2^f) reduced mod 2^modulus_bits. Non-finite input is an
  // overflow error regardless of policy.
  EncodeResult Encode(std::span<const double> values) const;

  // Signed reinterpretation divided by 2^f. `num_summed` is how many encoded
  // vectors were added to produce `residues`; it may not exceed max_parties.
  std::vector<double> Decode(std::span<const Residue> residues,
                             std::size_t num_summed) const;

  // Worst-case rounding error of decoding a sum of num_summed encodings.
  double ErrorBound(std::size_t num_summed) const;

 private:
  int frac_bits_;
  int modulus_bits_;
  std::size_t max_parties_;
  OverflowPolicy policy_;
  double scale_;
  double clamp_range_;
  Residue mask_;
};

// One client's share of a cohort's masks.
struct ClientMask {
  std::uint64_t session = 0;
  std::size_t slot = 0;
  std::size_t cohort_size = 0;
  int modulus_bits = 64;
  std::vector<Residue> residues;
};

struct MaskSet {
  std::uint64_t session = 0;
  std::vector<ClientMask> masks;

  std::size_t num_clients() const { return masks.size(); }
  std::size_t dimension() const {
    return masks.empty() ? 0 : masks.front().residues.size();
  }
};

// Trusted-dealer masks: num_clients - 1 uniform vectors, the last one the
// negated sum. Throws a configuration error for fewer than two clients.
MaskSet MakeMasks(std::size_t num_clients, std::size_t dimension,
                  std::uint64_t seed, int modulus_bits = 64);

struct MaskedUpdate {
  std::uint64_t session = 0;
  std::size_t slot = 0;
  std::size_t cohort_size = 0;
  int modulus_bits = 64;
  std::vector<Residue> residues;
};

// (encoded + mask) mod 2^modulus_bits.
MaskedUpdate Encrypt(std::span<const Residue> encoded, const ClientMask& mask);

// Coordinate-wise modular sum with no cohort checks.
std::vector<Residue> ModularSum(std::span<const MaskedUpdate> updates);

// Sums a complete cohort and decodes the total. Throws a protocol error if
// any slot of the session is missing or repeated, or sessions are mixed.
std::vector<double> AggregateDecode(std::span<const MaskedUpdate> updates,
                                    const FixedPointCodec& codec);

// Little-endian 64-bit words.
void WriteResidues(std::ostream& out, std::span<const Residue> residues);
std::vector<Residue> ReadResidues(std::istream& in);

}  // namespace fltop::secagg

#endif  // FLTOP_SECURE_AGG_H_
