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
#include "cdpr/error.hpp"

namespace cdpr {

const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDegenerateCable: return "DegenerateCable";
    case ErrorCode::kNonPositiveLength: return "NonPositiveLength";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kNoEquilibrium: return "NoEquilibrium";
    case ErrorCode::kOutsideWall: return "OutsideWall";
    case ErrorCode::kClutchDisengaged: return "ClutchDisengaged";
    case ErrorCode::kAtCenter: return "AtCenter";
    case ErrorCode::kTooFewMembers: return "TooFewMembers";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kPortInUse: return "PortInUse";
  }
  return "Unknown";
}

}  // namespace cdpr
