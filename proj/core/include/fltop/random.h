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

#ifndef FLTOP_RANDOM_H_
#define FLTOP_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fltop {

using Rng = std::mt19937_64;

// Stream tags keep independent consumers of the same seed apart.
enum class StreamTag : std::uint64_t {
  kInit = 1,
  kTopK = 2,
  kCohort = 3,
  kLocalTraining = 4,
  kRoundIndexSet = 5,
  kFixedIndexSet = 6,
  kNoise = 7,
  kMasks = 8,
  kCalibration = 9,
  kData = 10,
  kPartition = 11,
  kPublic = 12,
  kSplit = 13,
  kDownsample = 14,
};

// Deterministic generator for the stream identified by (seed, tag, path...).
// Distinct paths give statistically independent streams.
Rng MakeStream(std::uint64_t seed, StreamTag tag,
               std::initializer_list<std::uint64_t> path = {});

// Same as MakeStream but returns a 64-bit seed for APIs taking a seed.
std::uint64_t DeriveSeed(std::uint64_t seed, StreamTag tag,
                         std::initializer_list<std::uint64_t> path = {});

// Uniform k-subset of [0, n) in increasing order (selection sampling).
std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t k, Rng& rng);

}  // namespace fltop

#endif  // FLTOP_RANDOM_H_
