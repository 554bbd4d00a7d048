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

#ifndef FLTOP_ERROR_H_
#define FLTOP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fltop {

// Broad failure categories. The CLI maps kConfiguration to a usage error
// (exit 2); everything else is a runtime failure (exit 1).
enum class ErrorCode {
  kConfiguration,
  kDimension,
  kIndex,
  kData,
  kNumeric,
  kFormat,
  kProtocol,
  kOverflow,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Throws Error(code, message) when `condition` is false.
inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace fltop

#endif  // FLTOP_ERROR_H_
