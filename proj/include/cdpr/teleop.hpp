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

#include <string_view>

#include "cdpr/haptics.hpp"
#include "cdpr/kinematics.hpp"

namespace cdpr {

using TaskVector = Eigen::Matrix<double, 8, 1>;

enum class ActuatorMode { kPosition, kCurrent };
enum class KnobBinding { kRedundantJoint, kScale };

std::string_view ToString(ActuatorMode m);
ActuatorMode ParseActuatorMode(std::string_view s);
std::string_view ToString(KnobBinding b);
KnobBinding ParseKnobBinding(std::string_view s);

/// Gimbal manipulator joints: roll/pitch/yaw (rad), trigger (0..1), knob (rad).
struct GimbalState {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double trigger = 0.0;
  double knob = 0.0;

  Eigen::Matrix<double, 5, 1> AsVector() const;
  static GimbalState FromVector(const Eigen::Matrix<double, 5, 1>& v);
  bool operator==(const GimbalState&) const = default;
};

struct GimbalLimits {
  double pitch = 85.0 * kDegToRad;
  double yaw = 85.0 * kDegToRad;
};

/// Wraps roll into (-pi, pi], clamps pitch/yaw/trigger. Returns the number of
/// clamped joints (roll wrapping is not a clamp).
int ClampGimbal(GimbalState& gimbal, const GimbalLimits& limits);

struct SessionConfig {
  double scale = 1.0;                          // slave m per master m
  KnobBinding knob_binding = KnobBinding::kRedundantJoint;
  double knob_scale_gain = 1.0 / std::numbers::pi;  // scale *= 2^(gain*knob)
  GimbalLimits limits;

  void Validate() const;
};

struct SessionState {
  bool clutch_engaged = false;
  Vec3 master_ref = Vec3::Zero();   // q_t at engagement
  Vec3 slave_ref = Vec3::Zero();    // slave translation at engagement
  double scale = 1.0;
  ActuatorMode mode = ActuatorMode::kCurrent;
  GimbalState gimbal;
};

/// X_m = [q_t - q_t0; roll, pitch, yaw, trigger, knob].
struct MasterCommand {
  TaskVector x = TaskVector::Zero();
  Vec3 Translation() const { return x.head<3>(); }
};

/// X_s = [x_o + n (q_t - q_t0); gimbal joints].
struct SlaveCommand {
  TaskVector x = TaskVector::Zero();
  Vec3 Translation() const { return x.head<3>(); }
};

/// Captures both references. Throws kOutsideWall when the master is outside
/// `wall` unless `override_wall` is set; a null wall skips the check.
SessionState EngageClutch(const SessionState& s, const Pose& master,
                          const Vec3& slave_translation,
                          const VirtualWall* wall, bool override_wall = false);

SessionState DisengageClutch(const SessionState& s);

MasterCommand ComputeMasterCommand(const SessionState& s, const Pose& master,
                                   const GimbalState& gimbal);

SlaveCommand ComputeSlaveCommand(const SessionState& s,
                                 const MasterCommand& m);

SessionState SetActuatorMode(const SessionState& s, ActuatorMode mode);

/// Stateful wrapper used by the simulator: keeps the last slave command so
/// the slave holds position while the clutch is open, re-bases the
/// references on scale changes, and counts joint-limit clamps.
class TeleopSession {
 public:
  TeleopSession(SessionConfig cfg, const Vec3& initial_slave);

  const SessionState& state() const { return state_; }
  const SessionConfig& config() const { return cfg_; }
  const SlaveCommand& last_slave() const { return last_slave_; }
  int clamp_events() const { return clamp_events_; }

  void Engage(const Pose& master, const VirtualWall* wall,
              bool override_wall = false);
  void Disengage();
  void SetMode(ActuatorMode mode) { state_ = SetActuatorMode(state_, mode); }

  /// Stores the (clamped) gimbal reading; returns the number of clamps.
  int SetGimbal(const GimbalState& gimbal);

  /// Changes the translation scale without a jump in the slave stream.
  void SetScale(double scale, const Pose& master);

  /// Master and slave commands for the current master pose. Throws
  /// kClutchDisengaged while disengaged; last_slave() keeps the held value.
  std::pair<MasterCommand, SlaveCommand> Update(const Pose& master);

 private:
  double KnobScale() const;

  SessionConfig cfg_;
  SessionState state_;
  SlaveCommand last_slave_;
  int clamp_events_ = 0;
};

}  // namespace cdpr
