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

#ifndef FLTOP_SCHEME_H_
#define FLTOP_SCHEME_H_

#include <span>
#include <string>
#include <string_view>

namespace fltop {

enum class Selection { kAll, kTopK, kRandom };

// How a scheme chooses and treats the exchanged coordinates.
//   fl-top      topk,   fixed,     reinit
//   fl-top-bis  topk,   fixed,     no reinit
//   fl-basic    random, per round, reinit
//   fl-bas-2    random, per round, no reinit
//   fl-bas-3    random, fixed,     reinit
//   fl-bas-4    random, fixed,     no reinit
//   fl-std      all coordinates
// Each has a "-dp" variant that clips, noises and securely aggregates.
struct SchemeSpec {
  Selection selection = Selection::kTopK;
  bool fixed_across_rounds = true;
  bool reinit_nonselected = true;
  bool dp = false;

  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

// The downstream message is compressed whenever every client can rebuild the
// model from K values plus w0, which needs a set fixed for the whole run.
bool DownstreamCompressed(const SchemeSpec& scheme);

std::span<const std::string_view> SchemeNames();

// Throws a configuration error listing the valid names.
SchemeSpec SchemeByName(std::string_view name);
std::string SchemeName(const SchemeSpec& scheme);

}  // namespace fltop

#endif  // FLTOP_SCHEME_H_
