// Copyright 2026 The cdpr-master Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace cdpr {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIndexOutOfRange,
  kDegenerateCable,
  kNonPositiveLength,
  kNotConverged,
  kInfeasible,
  kNoEquilibrium,
  kOutsideWall,
  kClutchDisengaged,
  kAtCenter,
  kTooFewMembers,
  kParseError,
  kIoError,
  kPortInUse,
};

const char* ToString(ErrorCode code);

// All library failures are reported through this exception; the C API maps
// `code()` one-to-one onto cdpr_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cdpr
