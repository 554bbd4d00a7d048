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

#ifndef FLTOP_BANDWIDTH_H_
#define FLTOP_BANDWIDTH_H_

#include <cstddef>

namespace fltop {

inline constexpr double kBitsPerValue = 32.0;
inline constexpr double kBitsPerKilobyte = 8000.0;

// Average per-client traffic after `rounds` rounds, in kilobytes:
// (compressed ? ratio : 1) * n * 32 * rounds * sampling / 8000.
double BandwidthCostKb(double ratio, std::size_t n, int rounds, double sampling,
                       bool compressed);

}  // namespace fltop

#endif  // FLTOP_BANDWIDTH_H_
