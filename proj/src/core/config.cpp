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
#include "cdpr/config.hpp"

#include <cstdlib>
#include <fstream>

#include "cdpr/error.hpp"
#include "cdpr/serialization.hpp"

namespace cdpr {
namespace {

double Number(const Json& section, const char* key, double fallback) {
  if (!section.contains(key)) return fallback;
  const Json& v = section.at(key);
  if (!v.is_number()) ThrowParse(std::string(key) + ": expected a number");
  return v.get<double>();
}

int Integer(const Json& section, const char* key, int fallback) {
  if (!section.contains(key)) return fallback;
  const Json& v = section.at(key);
  if (!v.is_number_integer()) ThrowParse(std::string(key) + ": expected an integer");
  return v.get<int>();
}

bool Boolean(const Json& section, const char* key, bool fallback) {
  if (!section.contains(key)) return fallback;
  const Json& v = section.at(key);
  if (!v.is_boolean()) ThrowParse(std::string(key) + ": expected true/false");
  return v.get<bool>();
}

const Json& Section(const Json& j, const char* key) {
  static const Json kEmpty = Json::object();
  if (!j.contains(key)) return kEmpty;
  if (!j.at(key).is_object()) ThrowParse(std::string(key) + ": expected an object");
  return j.at(key);
}

}  // namespace

void ThrowParse(const std::string& msg) {
  throw Error(ErrorCode::kParseError, msg);
}

Json GeometryToJson(const CdprGeometry& g) {
  Json j;
  Json frame = Json::array();
  Json body = Json::array();
  for (int i = 0; i < kNumCables; ++i) {
    frame.push_back(ToJsonArray(g.frame_anchors[i]));
    body.push_back(ToJsonArray(g.body_anchors[i]));
  }
  j["frame_anchors_m"] = frame;
  j["body_anchors_m"] = body;
  return j;
}

CdprGeometry GeometryFromJson(const Json& j) {
  if (!j.is_object()) ThrowParse("geometry: expected an object");
  for (const char* key : {"frame_anchors_m", "body_anchors_m"}) {
    if (!j.contains(key) || !j.at(key).is_array() ||
        j.at(key).size() != kNumCables) {
      ThrowParse(std::string("geometry: '") + key + "' must list 8 points");
    }
  }
  CdprGeometry g;
  for (int i = 0; i < kNumCables; ++i) {
    g.frame_anchors[i] = FromJsonArray<3>(j["frame_anchors_m"][i], "frame anchor");
    g.body_anchors[i] = FromJsonArray<3>(j["body_anchors_m"][i], "body anchor");
  }
  return g;
}

FkConfig FkSettings::ForGeometry(const CdprGeometry& g) const {
  FkConfig cfg = FkConfig::ForGeometry(g);
  cfg.max_iterations = max_iterations;
  cfg.residual_tol = residual_tol;
  cfg.step_tol = step_tol;
  cfg.initial_damping = initial_damping;
  return cfg;
}

void SimConfig::Validate() const {
  if (!(dt > 0.0) || broadcast_every <= 0 || !(pursuit_time_constant > 0.0) ||
      !(gimbal_time_constant > 0.0) || !(hand_compliance >= 0.0) ||
      !(noise_sigma >= 0.0) || !(latency_min >= 0.0) ||
      !(latency_max >= latency_min) || !(current_per_newton > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid sim configuration");
  }
}

void AppConfig::Validate() const {
  if (!(statics.f_min >= 0.0) || !(statics.f_max > statics.f_min) ||
      !(statics.wrench_tol > 0.0) || !(inertia.mass > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid statics configuration");
  }
  session.Validate();
  wall.Validate();
  haptics.Validate();
  sim.Validate();
}

AppConfig DefaultConfig() {
  AppConfig cfg;
  // `cdpr workspace` fit on the default rig at 10 deg, rounded down to cm.
  cfg.wall.center = Vec3(0.0, 0.0, 0.35);
  cfg.wall.radii = Vec3(0.25, 0.28, 0.28);
  return cfg;
}

Json ConfigToJson(const AppConfig& cfg) {
  Json j;
  j["fk"] = {{"max_iterations", cfg.fk.max_iterations},
             {"residual_tol_m", cfg.fk.residual_tol},
             {"step_tol", cfg.fk.step_tol},
             {"initial_damping", cfg.fk.initial_damping}};
  j["statics"] = {{"f_min_n", cfg.statics.f_min},
                  {"f_max_n", cfg.statics.f_max},
                  {"wrench_tol", cfg.statics.wrench_tol},
                  {"mass_kg", cfg.inertia.mass},
                  {"center_of_mass_m", ToJsonArray(cfg.inertia.center_of_mass)}};
  j["session"] = {{"scale", cfg.session.scale},
                  {"knob_binding", std::string(ToString(cfg.session.knob_binding))},
                  {"knob_scale_gain", cfg.session.knob_scale_gain},
                  {"pitch_limit_deg", cfg.session.limits.pitch / kDegToRad},
                  {"yaw_limit_deg", cfg.session.limits.yaw / kDegToRad}};
  j["haptics"] = {{"gain_n", cfg.haptics.gain},
                  {"pulse_period_s", cfg.haptics.pulse_period},
                  {"pulse_duty", cfg.haptics.pulse_duty},
                  {"max_pulses", cfg.haptics.max_pulses},
                  {"wall_center_m", ToJsonArray(cfg.wall.center)},
                  {"wall_radii_m", ToJsonArray(cfg.wall.radii)},
                  {"orientation_threshold_deg",
                   cfg.wall.orientation_threshold / kDegToRad},
                  {"wall_follows_reference", cfg.wall_follows_reference}};
  j["sim"] = {{"dt_s", cfg.sim.dt},
              {"broadcast_every", cfg.sim.broadcast_every},
              {"pursuit_time_constant_s", cfg.sim.pursuit_time_constant},
              {"gimbal_time_constant_s", cfg.sim.gimbal_time_constant},
              {"hand_compliance_m_per_n", cfg.sim.hand_compliance},
              {"noise_sigma_m", cfg.sim.noise_sigma},
              {"latency_min_ms", cfg.sim.latency_min * 1e3},
              {"latency_max_ms", cfg.sim.latency_max * 1e3},
              {"current_per_newton_a", cfg.sim.current_per_newton}};
  return j;
}

AppConfig ConfigFromJson(const Json& j) {
  if (!j.is_object()) ThrowParse("config: expected an object");
  AppConfig cfg = DefaultConfig();

  const Json& fk = Section(j, "fk");
  cfg.fk.max_iterations = Integer(fk, "max_iterations", cfg.fk.max_iterations);
  cfg.fk.residual_tol = Number(fk, "residual_tol_m", cfg.fk.residual_tol);
  cfg.fk.step_tol = Number(fk, "step_tol", cfg.fk.step_tol);
  cfg.fk.initial_damping = Number(fk, "initial_damping", cfg.fk.initial_damping);

  const Json& st = Section(j, "statics");
  cfg.statics.f_min = Number(st, "f_min_n", cfg.statics.f_min);
  cfg.statics.f_max = Number(st, "f_max_n", cfg.statics.f_max);
  cfg.statics.wrench_tol = Number(st, "wrench_tol", cfg.statics.wrench_tol);
  cfg.inertia.mass = Number(st, "mass_kg", cfg.inertia.mass);
  if (st.contains("center_of_mass_m")) {
    cfg.inertia.center_of_mass = FromJsonArray<3>(st["center_of_mass_m"], "center_of_mass_m");
  }

  const Json& se = Section(j, "session");
  cfg.session.scale = Number(se, "scale", cfg.session.scale);
  if (se.contains("knob_binding")) {
    if (!se["knob_binding"].is_string()) ThrowParse("knob_binding: expected a string");
    try {
      cfg.session.knob_binding = ParseKnobBinding(se["knob_binding"].get<std::string>());
    } catch (const Error& e) {
      ThrowParse(e.what());
    }
  }
  cfg.session.knob_scale_gain = Number(se, "knob_scale_gain", cfg.session.knob_scale_gain);
  cfg.session.limits.pitch =
      Number(se, "pitch_limit_deg", cfg.session.limits.pitch / kDegToRad) * kDegToRad;
  cfg.session.limits.yaw =
      Number(se, "yaw_limit_deg", cfg.session.limits.yaw / kDegToRad) * kDegToRad;

  const Json& h = Section(j, "haptics");
  cfg.haptics.gain = Number(h, "gain_n", cfg.haptics.gain);
  cfg.haptics.pulse_period = Number(h, "pulse_period_s", cfg.haptics.pulse_period);
  cfg.haptics.pulse_duty = Number(h, "pulse_duty", cfg.haptics.pulse_duty);
  cfg.haptics.max_pulses = Integer(h, "max_pulses", cfg.haptics.max_pulses);
  if (h.contains("wall_center_m")) cfg.wall.center = FromJsonArray<3>(h["wall_center_m"], "wall_center_m");
  if (h.contains("wall_radii_m")) cfg.wall.radii = FromJsonArray<3>(h["wall_radii_m"], "wall_radii_m");
  cfg.wall.orientation_threshold =
      Number(h, "orientation_threshold_deg", cfg.wall.orientation_threshold / kDegToRad) *
      kDegToRad;
  cfg.wall_follows_reference =
      Boolean(h, "wall_follows_reference", cfg.wall_follows_reference);

  const Json& sim = Section(j, "sim");
  cfg.sim.dt = Number(sim, "dt_s", cfg.sim.dt);
  cfg.sim.broadcast_every = Integer(sim, "broadcast_every", cfg.sim.broadcast_every);
  cfg.sim.pursuit_time_constant =
      Number(sim, "pursuit_time_constant_s", cfg.sim.pursuit_time_constant);
  cfg.sim.gimbal_time_constant =
      Number(sim, "gimbal_time_constant_s", cfg.sim.gimbal_time_constant);
  cfg.sim.hand_compliance = Number(sim, "hand_compliance_m_per_n", cfg.sim.hand_compliance);
  cfg.sim.noise_sigma = Number(sim, "noise_sigma_m", cfg.sim.noise_sigma);
  cfg.sim.latency_min = Number(sim, "latency_min_ms", cfg.sim.latency_min * 1e3) * 1e-3;
  cfg.sim.latency_max = Number(sim, "latency_max_ms", cfg.sim.latency_max * 1e3) * 1e-3;
  cfg.sim.current_per_newton =
      Number(sim, "current_per_newton_a", cfg.sim.current_per_newton);

  cfg.Validate();
  return cfg;
}

AppConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return ConfigFromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void SaveConfig(const AppConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << ConfigToJson(cfg).dump(2) << "\n";
}

std::optional<std::filesystem::path> ResolveConfigPath(
    const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return explicit_path;
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env) {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

}  // namespace cdpr
