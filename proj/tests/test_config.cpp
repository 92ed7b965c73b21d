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
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "cdpr/config.hpp"
#include "cdpr/error.hpp"
#include "cdpr/serialization.hpp"

using namespace cdpr;

namespace {

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cdpr_test_config_" + name);
}

ErrorCode CodeOf(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("geometry: JSON round trip is exact") {
  CdprGeometry g = DefaultGeometry();
  g.body_anchors[3] = Vec3(0.1 / 3.0, -1e-17, -0.07);
  const CdprGeometry back = GeometryFromJson(Json::parse(GeometryToJson(g).dump()));
  for (int i = 0; i < kNumCables; ++i) {
    CHECK(back.frame_anchors[i] == g.frame_anchors[i]);
    CHECK(back.body_anchors[i] == g.body_anchors[i]);
  }
  const auto path = TempPath("rig.json");
  SaveGeometry(g, path);
  CHECK(LoadGeometry(path).body_anchors[3] == g.body_anchors[3]);
  std::filesystem::remove(path);
}

TEST_CASE("geometry: malformed input is a parse error") {
  Json j = GeometryToJson(DefaultGeometry());
  j["frame_anchors_m"].erase(0);
  CHECK(CodeOf([&] { GeometryFromJson(j); }) == ErrorCode::kParseError);
  j = GeometryToJson(DefaultGeometry());
  j["body_anchors_m"][2][1] = "x";
  CHECK(CodeOf([&] { GeometryFromJson(j); }) == ErrorCode::kParseError);
  CHECK(CodeOf([&] { GeometryFromJson(Json::array()); }) == ErrorCode::kParseError);
  CHECK(CodeOf([] { LoadGeometry("/nonexistent/rig.json"); }) == ErrorCode::kIoError);
}

TEST_CASE("config: JSON round trip preserves every field") {
  AppConfig cfg = DefaultConfig();
  cfg.fk.max_iterations = 77;
  cfg.statics.f_min = 0.5;
  cfg.inertia.mass = 0.4;
  cfg.inertia.center_of_mass = Vec3(0.001, 0, -0.002);
  cfg.session.scale = 1.5;
  cfg.session.knob_binding = KnobBinding::kScale;
  cfg.wall.radii = Vec3(0.2, 0.21, 0.22);
  cfg.wall_follows_reference = true;
  cfg.haptics.max_pulses = 5;
  cfg.sim.noise_sigma = 1.2e-3;
  cfg.sim.latency_min = 0.02;
  const Json j = ConfigToJson(cfg);
  const AppConfig back = ConfigFromJson(Json::parse(j.dump()));
  CHECK(ConfigToJson(back).dump() == j.dump());
  CHECK(back.fk.max_iterations == 77);
  CHECK(back.inertia.center_of_mass == cfg.inertia.center_of_mass);
  CHECK(back.session.knob_binding == KnobBinding::kScale);
  CHECK(back.wall_follows_reference);
  CHECK(back.sim.latency_min == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("config: missing sections and keys fall back to the defaults") {
  const AppConfig d = DefaultConfig();
  CHECK(ConfigToJson(ConfigFromJson(Json::object())).dump() == ConfigToJson(d).dump());
  const AppConfig partial = ConfigFromJson(Json::parse(R"({"sim": {"noise_sigma_m": 0.001}})"));
  CHECK(partial.sim.noise_sigma == 0.001);
  CHECK(partial.sim.dt == d.sim.dt);
  CHECK(partial.haptics.gain == d.haptics.gain);
}

TEST_CASE("config: wrong types and invalid values are rejected") {
  CHECK(CodeOf([] { ConfigFromJson(Json::parse(R"({"sim": 3})")); }) == ErrorCode::kParseError);
  CHECK(CodeOf([] { ConfigFromJson(Json::parse(R"({"fk": {"max_iterations": 2.5}})")); }) ==
        ErrorCode::kParseError);
  CHECK(CodeOf([] { ConfigFromJson(Json::parse(R"({"haptics": {"wall_follows_reference": 1}})")); }) ==
        ErrorCode::kParseError);
  CHECK(CodeOf([] { ConfigFromJson(Json::parse(R"({"session": {"knob_binding": "volume"}})")); }) ==
        ErrorCode::kParseError);
  CHECK(CodeOf([] { ConfigFromJson(Json::parse(R"({"sim": {"latency_min_ms": 90, "latency_max_ms": 50}})")); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ConfigFromJson(Json::parse(R"({"statics": {"mass_kg": 0}})")); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("config: file load and save") {
  const auto path = TempPath("cfg.json");
  AppConfig cfg = DefaultConfig();
  cfg.haptics.gain = 3.0;
  SaveConfig(cfg, path);
  CHECK(LoadConfig(path).haptics.gain == 3.0);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK(CodeOf([&] { LoadConfig(path); }) == ErrorCode::kParseError);
  std::filesystem::remove(path);
  CHECK(CodeOf([&] { LoadConfig(path); }) == ErrorCode::kIoError);
}

TEST_CASE("config path: explicit path beats the environment variable") {
  ::unsetenv(kConfigEnvVar);
  CHECK_FALSE(ResolveConfigPath(std::nullopt).has_value());
  CHECK(ResolveConfigPath(std::filesystem::path("a.json")) == std::filesystem::path("a.json"));
  ::setenv(kConfigEnvVar, "/tmp/from_env.json", 1);
  CHECK(ResolveConfigPath(std::nullopt) == std::filesystem::path("/tmp/from_env.json"));
  CHECK(ResolveConfigPath(std::filesystem::path("a.json")) == std::filesystem::path("a.json"));
  CHECK(ResolveConfigPath(std::filesystem::path()) == std::filesystem::path("/tmp/from_env.json"));
  ::setenv(kConfigEnvVar, "", 1);
  CHECK_FALSE(ResolveConfigPath(std::nullopt).has_value());
  ::unsetenv(kConfigEnvVar);
}

TEST_CASE("shipped config files equal the built-in defaults") {
  const std::filesystem::path dir = CDPR_SOURCE_DIR "/config";
  CHECK(ConfigToJson(LoadConfig(dir / "default.json")).dump() == ConfigToJson(DefaultConfig()).dump());
  CHECK(GeometryToJson(LoadGeometry(dir / "default_rig.json")).dump() ==
        GeometryToJson(DefaultGeometry()).dump());
}

TEST_CASE("default wall sits at the frame center with a 10 deg threshold") {
  const AppConfig cfg = DefaultConfig();
  CHECK(cfg.wall.center == DefaultGeometry().FrameCenter());
  CHECK(cfg.wall.radii == Vec3(0.25, 0.28, 0.28));
  CHECK(cfg.wall.orientation_threshold == doctest::Approx(10.0 * kDegToRad));
}
