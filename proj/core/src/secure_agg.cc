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

#include "fltop/secure_agg.h"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "fltop/error.h"
#include "fltop/random.h"

namespace fltop::secagg {
namespace {

Residue MaskFor(int modulus_bits) {
  return modulus_bits == 64 ? ~Residue{0} : ((Residue{1} << modulus_bits) - 1);
}

}  // namespace

FixedPointCodec::FixedPointCodec(int frac_bits, int modulus_bits,
                                 std::size_t max_parties, OverflowPolicy policy)
    : frac_bits_(frac_bits),
      modulus_bits_(modulus_bits),
      max_parties_(max_parties),
      policy_(policy) {
  Require(modulus_bits >= 16 && modulus_bits <= 64, ErrorCode::kConfiguration,
          "modulus_bits must lie in [16, 64]");
  Require(frac_bits >= 0 && frac_bits < modulus_bits - 8,
          ErrorCode::kConfiguration, "frac_bits must be below modulus_bits - 8");
  Require(max_parties >= 1, ErrorCode::kConfiguration, "max_parties must be >= 1");
  scale_ = std::ldexp(1.0, frac_bits);
  clamp_range_ = std::ldexp(1.0, modulus_bits - frac_bits - 2) /
                 static_cast<double>(max_parties);
  mask_ = MaskFor(modulus_bits);
}

EncodeResult FixedPointCodec::Encode(std::span<const double> values) const {
  EncodeResult result;
  result.residues.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kOverflow,
                  "non-finite value at coordinate " + std::to_string(i));
    }
    if (std::abs(v) > clamp_range_) {
      if (policy_ == OverflowPolicy::kError) {
        throw Error(ErrorCode::kOverflow,
                    "value " + std::to_string(v) + " at coordinate " +
                        std::to_string(i) + " exceeds the headroom " +
                        std::to_string(clamp_range_));
      }
      v = std::copysign(clamp_range_, v);
      ++result.clamp_count;
    }
    const auto fixed = static_cast<std::int64_t>(std::llround(v * scale_));
    result.residues.push_back(static_cast<Residue>(fixed) & mask_);
  }
  return result;
}

std::vector<double> FixedPointCodec::Decode(std::span<const Residue> residues,
                                            std::size_t num_summed) const {
  Require(num_summed >= 1 && num_summed <= max_parties_,
          ErrorCode::kConfiguration,
          "decoding a sum of " + std::to_string(num_summed) +
              " vectors with a codec sized for " + std::to_string(max_parties_));
  const Residue half = Residue{1} << (modulus_bits_ - 1);
  std::vector<double> out;
  out.reserve(residues.size());
  for (Residue r : residues) {
    r &= mask_;
    std::int64_t signed_value;
    if (modulus_bits_ == 64) {
      signed_value = static_cast<std::int64_t>(r);
    } else {
      signed_value = r >= half
                         ? static_cast<std::int64_t>(r) -
                               static_cast<std::int64_t>(mask_) - 1
                         : static_cast<std::int64_t>(r);
    }
    out.push_back(static_cast<double>(signed_value) / scale_);
  }
  return out;
}

double FixedPointCodec::ErrorBound(std::size_t num_summed) const {
  return static_cast<double>(num_summed) * std::ldexp(1.0, -frac_bits_ - 1);
}

MaskSet MakeMasks(std::size_t num_clients, std::size_t dimension,
                  std::uint64_t seed, int modulus_bits) {
  Require(num_clients >= 2, ErrorCode::kConfiguration,
          "additive masking needs at least two clients");
  Require(modulus_bits >= 16 && modulus_bits <= 64, ErrorCode::kConfiguration,
          "modulus_bits must lie in [16, 64]");
  const Residue mask = MaskFor(modulus_bits);
  Rng rng = MakeStream(seed, StreamTag::kMasks);
  MaskSet set;
  set.session = rng();
  set.masks.resize(num_clients);
  std::vector<Residue> running(dimension, 0);
  for (std::size_t c = 0; c < num_clients; ++c) {
    ClientMask& m = set.masks[c];
    m.session = set.session;
    m.slot = c;
    m.cohort_size = num_clients;
    m.modulus_bits = modulus_bits;
    m.residues.resize(dimension);
    for (std::size_t i = 0; i < dimension; ++i) {
      if (c + 1 < num_clients) {
        m.residues[i] = rng() & mask;
        running[i] = (running[i] + m.residues[i]) & mask;
      } else {
        m.residues[i] = (Residue{0} - running[i]) & mask;
      }
    }
  }
  return set;
}

MaskedUpdate Encrypt(std::span<const Residue> encoded, const ClientMask& mask) {
  Require(encoded.size() == mask.residues.size(), ErrorCode::kDimension,
          "encoded vector has length " + std::to_string(encoded.size()) +
              ", mask has " + std::to_string(mask.residues.size()));
  const Residue m = MaskFor(mask.modulus_bits);
  MaskedUpdate out{mask.session, mask.slot, mask.cohort_size, mask.modulus_bits, {}};
  out.residues.resize(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    out.residues[i] = (encoded[i] + mask.residues[i]) & m;
  }
  return out;
}

std::vector<Residue> ModularSum(std::span<const MaskedUpdate> updates) {
  if (updates.empty()) return {};
  const std::size_t dim = updates.front().residues.size();
  const Residue m = MaskFor(updates.front().modulus_bits);
  std::vector<Residue> sum(dim, 0);
  for (const MaskedUpdate& u : updates) {
    Require(u.residues.size() == dim, ErrorCode::kDimension,
            "masked updates differ in length");
    for (std::size_t i = 0; i < dim; ++i) sum[i] = (sum[i] + u.residues[i]) & m;
  }
  return sum;
}

std::vector<double> AggregateDecode(std::span<const MaskedUpdate> updates,
                                    const FixedPointCodec& codec) {
  Require(!updates.empty(), ErrorCode::kProtocol, "no masked updates to aggregate");
  const MaskedUpdate& first = updates.front();
  std::vector<bool> seen(first.cohort_size, false);
  for (const MaskedUpdate& u : updates) {
    Require(u.session == first.session && u.cohort_size == first.cohort_size,
            ErrorCode::kProtocol, "masked updates from different sessions");
    Require(u.modulus_bits == codec.modulus_bits(), ErrorCode::kProtocol,
            "masked update ring does not match the codec");
    Require(u.slot < u.cohort_size && !seen[u.slot], ErrorCode::kProtocol,
            "duplicate or invalid client slot " + std::to_string(u.slot));
    seen[u.slot] = true;
  }
  Require(updates.size() == first.cohort_size, ErrorCode::kProtocol,
          "missing masked updates: got " + std::to_string(updates.size()) +
              " of " + std::to_string(first.cohort_size));
  return codec.Decode(ModularSum(updates), updates.size());
}

void WriteResidues(std::ostream& out, std::span<const Residue> residues) {
  for (Residue r : residues) {
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((r >> (8 * b)) & 0xFF);
    out.write(bytes, 8);
  }
}

std::vector<Residue> ReadResidues(std::istream& in) {
  std::vector<Residue> out;
  char bytes[8];
  while (in.read(bytes, 8)) {
    Residue r = 0;
    for (int b = 0; b < 8; ++b) {
      r |= static_cast<Residue>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    }
    out.push_back(r);
  }
  Require(in.gcount() == 0, ErrorCode::kFormat,
          "residue stream length is not a multiple of 8 bytes");
  return out;
}

}  // namespace fltop::secagg
