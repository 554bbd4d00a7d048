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

#ifndef FLTOP_REPORT_H_
#define FLTOP_REPORT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "fltop/federation.h"

namespace fltop {

inline constexpr std::string_view kTraceHeader =
    "round,accuracy,balanced_accuracy,auroc,down_kb,up_kb,epsilon,clamps";

// Shortest decimal that round-trips; "nan" and "inf" for non-finite values.
std::string FormatNumber(double value);

// Header plus one row per round. The epsilon cell is empty for runs without
// differential privacy.
void WriteTraceCsv(std::ostream& out, std::span<const RoundMetrics> trace);

}  // namespace fltop

#endif  // FLTOP_REPORT_H_
