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

#include "fltop/report.h"

#include <array>
#include <charconv>
#include <ostream>

namespace fltop {

std::string FormatNumber(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

void WriteTraceCsv(std::ostream& out, std::span<const RoundMetrics> trace) {
  out << kTraceHeader << '\n';
  for (const RoundMetrics& m : trace) {
    out << m.round << ',' << FormatNumber(m.accuracy) << ','
        << FormatNumber(m.balanced_accuracy) << ',' << FormatNumber(m.auroc) << ','
        << FormatNumber(m.down_kb) << ',' << FormatNumber(m.up_kb) << ','
        << (m.epsilon ? FormatNumber(*m.epsilon) : std::string()) << ','
        << m.clamps << '\n';
  }
}

}  // namespace fltop
