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

#include "fltop/error.h"

#include <string>

namespace fltop {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration:
      return "configuration error";
    case ErrorCode::kDimension:
      return "dimension error";
    case ErrorCode::kIndex:
      return "index error";
    case ErrorCode::kData:
      return "data error";
    case ErrorCode::kNumeric:
      return "numeric error";
    case ErrorCode::kFormat:
      return "format error";
    case ErrorCode::kProtocol:
      return "protocol error";
    case ErrorCode::kOverflow:
      return "overflow error";
    case ErrorCode::kIo:
      return "i/o error";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace fltop
