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

#ifndef FLTOP_TOOLS_COMMANDS_H_
#define FLTOP_TOOLS_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace fltop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the fltop binary. Subcommands: run, sweep, accountant,
// calibrate, select-topk. Returns the process exit code.
int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err);

// Parses "0.05,0.1" style lists. Duplicates are dropped with a warning on
// `err`, keeping the first occurrence.
std::vector<double> ParseRatioList(const std::string& text, std::ostream& err);

}  // namespace fltop::cli

#endif  // FLTOP_TOOLS_COMMANDS_H_
