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

#include "fltop/scheme.h"

#include <array>
#include <string>

#include "fltop/error.h"

namespace fltop {
namespace {

struct NamedScheme {
  std::string_view name;
  SchemeSpec spec;
};

constexpr std::array<NamedScheme, 14> kSchemes = {{
    {"fl-std", {Selection::kAll, true, true, false}},
    {"fl-std-dp", {Selection::kAll, true, true, true}},
    {"fl-top", {Selection::kTopK, true, true, false}},
    {"fl-top-dp", {Selection::kTopK, true, true, true}},
    {"fl-top-bis", {Selection::kTopK, true, false, false}},
    {"fl-top-bis-dp", {Selection::kTopK, true, false, true}},
    {"fl-basic", {Selection::kRandom, false, true, false}},
    {"fl-basic-dp", {Selection::kRandom, false, true, true}},
    {"fl-bas-2", {Selection::kRandom, false, false, false}},
    {"fl-bas-2-dp", {Selection::kRandom, false, false, true}},
    {"fl-bas-3", {Selection::kRandom, true, true, false}},
    {"fl-bas-3-dp", {Selection::kRandom, true, true, true}},
    {"fl-bas-4", {Selection::kRandom, true, false, false}},
    {"fl-bas-4-dp", {Selection::kRandom, true, false, true}},
}};

constexpr auto kNames = [] {
  std::array<std::string_view, kSchemes.size()> names{};
  for (std::size_t i = 0; i < kSchemes.size(); ++i) names[i] = kSchemes[i].name;
  return names;
}();

}  // namespace

bool DownstreamCompressed(const SchemeSpec& scheme) {
  return scheme.selection != Selection::kAll && scheme.fixed_across_rounds;
}

std::span<const std::string_view> SchemeNames() { return kNames; }

SchemeSpec SchemeByName(std::string_view name) {
  for (const NamedScheme& s : kSchemes) {
    if (s.name == name) return s.spec;
  }
  std::string valid;
  for (std::string_view n : kNames) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw Error(ErrorCode::kConfiguration,
              "unknown scheme '" + std::string(name) + "'; valid schemes: " + valid);
}

std::string SchemeName(const SchemeSpec& scheme) {
  for (const NamedScheme& s : kSchemes) {
    if (s.spec.selection == scheme.selection && s.spec.dp == scheme.dp &&
        (scheme.selection == Selection::kAll ||
         (s.spec.fixed_across_rounds == scheme.fixed_across_rounds &&
          s.spec.reinit_nonselected == scheme.reinit_nonselected))) {
      return std::string(s.name);
    }
  }
  return "custom";
}

}  // namespace fltop
