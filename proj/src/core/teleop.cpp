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
#include "cdpr/teleop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdpr/error.hpp"

namespace cdpr {

std::string_view ToString(ActuatorMode m) {
  return m == ActuatorMode::kPosition ? "position" : "current";
}

ActuatorMode ParseActuatorMode(std::string_view s) {
  if (s == "position") return ActuatorMode::kPosition;
  if (s == "current") return ActuatorMode::kCurrent;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown actuator mode '" + std::string(s) + "'");
}

std::string_view ToString(KnobBinding b) {
  return b == KnobBinding::kScale ? "scale" : "redundant_joint";
}

KnobBinding ParseKnobBinding(std::string_view s) {
  if (s == "scale") return KnobBinding::kScale;
  if (s == "redundant_joint") return KnobBinding::kRedundantJoint;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown knob binding '" + std::string(s) + "'");
}

Eigen::Matrix<double, 5, 1> GimbalState::AsVector() const {
  Eigen::Matrix<double, 5, 1> v;
  v << roll, pitch, yaw, trigger, knob;
  return v;
}

GimbalState GimbalState::FromVector(const Eigen::Matrix<double, 5, 1>& v) {
  return GimbalState{v[0], v[1], v[2], v[3], v[4]};
}

int ClampGimbal(GimbalState& gimbal, const GimbalLimits& limits) {
  if (gimbal.roll <= -std::numbers::pi || gimbal.roll > std::numbers::pi) {
    gimbal.roll = std::remainder(gimbal.roll, 2.0 * std::numbers::pi);
    if (gimbal.roll <= -std::numbers::pi) gimbal.roll += 2.0 * std::numbers::pi;
  }
  int clamps = 0;
  auto clamp = [&clamps](double& v, double lo, double hi) {
    const double c = std::clamp(v, lo, hi);
    if (c != v) ++clamps;
    v = c;
  };
  clamp(gimbal.pitch, -limits.pitch, limits.pitch);
  clamp(gimbal.yaw, -limits.yaw, limits.yaw);
  clamp(gimbal.trigger, 0.0, 1.0);
  return clamps;
}

void SessionConfig::Validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "session scale must be positive");
  }
  if (!(limits.pitch > 0.0) || !(limits.yaw > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "joint limits must be positive");
  }
}

SessionState EngageClutch(const SessionState& s, const Pose& master,
                          const Vec3& slave_translation,
                          const VirtualWall* wall, bool override_wall) {
  if (wall != nullptr && !override_wall &&
      WallValue(*wall, master.translation) > 1.0) {
    throw Error(ErrorCode::kOutsideWall,
                "cannot engage the clutch outside the virtual wall");
  }
  SessionState out = s;
  out.master_ref = master.translation;
  out.slave_ref = slave_translation;
  out.clutch_engaged = true;
  return out;
}

SessionState DisengageClutch(const SessionState& s) {
  SessionState out = s;
  out.clutch_engaged = false;
  return out;
}

MasterCommand ComputeMasterCommand(const SessionState& s, const Pose& master,
                                   const GimbalState& gimbal) {
  if (!s.clutch_engaged) {
    throw Error(ErrorCode::kClutchDisengaged, "clutch is disengaged");
  }
  MasterCommand m;
  m.x.head<3>() = master.translation - s.master_ref;
  m.x.tail<5>() = gimbal.AsVector();
  return m;
}

SlaveCommand ComputeSlaveCommand(const SessionState& s,
                                 const MasterCommand& m) {
  if (!s.clutch_engaged) {
    throw Error(ErrorCode::kClutchDisengaged, "clutch is disengaged");
  }
  SlaveCommand out;
  out.x.head<3>() = s.slave_ref + s.scale * m.Translation();
  out.x.tail<5>() = m.x.tail<5>();
  return out;
}

SessionState SetActuatorMode(const SessionState& s, ActuatorMode mode) {
  SessionState out = s;
  out.mode = mode;
  return out;
}

TeleopSession::TeleopSession(SessionConfig cfg, const Vec3& initial_slave)
    : cfg_(cfg) {
  cfg_.Validate();
  state_.scale = cfg_.scale;
  state_.slave_ref = initial_slave;
  last_slave_.x.head<3>() = initial_slave;
}

void TeleopSession::Engage(const Pose& master, const VirtualWall* wall,
                           bool override_wall) {
  state_ = EngageClutch(state_, master, last_slave_.Translation(), wall,
                        override_wall);
}

void TeleopSession::Disengage() { state_ = DisengageClutch(state_); }

double TeleopSession::KnobScale() const {
  if (cfg_.knob_binding != KnobBinding::kScale) return cfg_.scale;
  return cfg_.scale * std::exp2(cfg_.knob_scale_gain * state_.gimbal.knob);
}

int TeleopSession::SetGimbal(const GimbalState& gimbal) {
  GimbalState g = gimbal;
  const int clamps = ClampGimbal(g, cfg_.limits);
  clamp_events_ += clamps;
  state_.gimbal = g;
  return clamps;
}

void TeleopSession::SetScale(double scale, const Pose& master) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  }
  if (scale == state_.scale) return;
  if (state_.clutch_engaged) {
    // Re-base so the current slave position is kept.
    const MasterCommand m = ComputeMasterCommand(state_, master, state_.gimbal);
    state_.slave_ref = ComputeSlaveCommand(state_, m).Translation();
    state_.master_ref = master.translation;
  }
  state_.scale = scale;
}

std::pair<MasterCommand, SlaveCommand> TeleopSession::Update(
    const Pose& master) {
  if (cfg_.knob_binding == KnobBinding::kScale) SetScale(KnobScale(), master);
  const MasterCommand m = ComputeMasterCommand(state_, master, state_.gimbal);
  last_slave_ = ComputeSlaveCommand(state_, m);
  return {m, last_slave_};
}

}  // namespace cdpr
