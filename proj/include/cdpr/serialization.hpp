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

#include <string>

#include <json.hpp>

#include "cdpr/kinematics.hpp"

namespace cdpr {

struct AppConfig;

// Insertion-ordered so that emitted files are stable and readable.
using Json = nlohmann::ordered_json;

[[noreturn]] void ThrowParse(const std::string& msg);

template <typename Derived>
Json ToJsonArray(const Eigen::MatrixBase<Derived>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

/// Reads a fixed-size numeric array; throws kParseError on shape mismatch.
template <int N>
Eigen::Matrix<double, N, 1> FromJsonArray(const Json& j, const char* what) {
  Eigen::Matrix<double, N, 1> v;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N)) {
    ThrowParse(std::string(what) + ": expected array of " + std::to_string(N) +
               " numbers");
  }
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) ThrowParse(std::string(what) + ": not a number");
    v[i] = j[i].get<double>();
  }
  return v;
}


Json GeometryToJson(const CdprGeometry& g);
CdprGeometry GeometryFromJson(const Json& j);

Json ConfigToJson(const AppConfig& cfg);
AppConfig ConfigFromJson(const Json& j);

}  // namespace cdpr
