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
#include "cdpr/haptics.hpp"

#include <cmath>

#include "cdpr/error.hpp"

namespace cdpr {

void VirtualWall::Validate() const {
  if (!center.allFinite() || !(radii.array() > 0.0).all()) {
    throw Error(ErrorCode::kInvalidArgument, "wall radii must be positive");
  }
  if (!(orientation_threshold > 0.0 &&
        orientation_threshold < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "orientation threshold must lie in (0, 90) deg");
  }
}

void HapticConfig::Validate() const {
  if (!(gain > 0.0) || !(pulse_period > 0.0) ||
      !(pulse_duty >= 0.0 && pulse_duty <= 1.0) || max_pulses < 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid haptic configuration");
  }
}

double WallValue(const VirtualWall& w, const Vec3& qt) {
  return (qt - w.center).cwiseQuotient(w.radii).squaredNorm();
}

Vector6 RepulsionDemand(const VirtualWall& w, const Vec3& qt,
                        const HapticConfig& cfg) {
  const Vec3 offset = qt - w.center;
  const double dist = offset.norm();
  if (dist == 0.0) {
    throw Error(ErrorCode::kAtCenter, "repulsion direction undefined at center");
  }
  Vector6 demand = Vector6::Zero();
  if (WallValue(w, qt) > 1.0) demand.head<3>() = -cfg.gain * offset / dist;
  return demand;
}

TensionSolution HapticTensions(const CdprGeometry& g, const Pose& p,
                               const Vector6& demand,
                               const PlatformInertia& inertia,
                               const StaticsConfig& cfg) {
  const Wrench grav = GravityWrench(p, inertia);
  Wrench desired;
  desired.force = demand.head<3>() - grav.force;
  desired.torque = demand.tail<3>() - grav.torque;
  return DistributeTensions(g, p, desired, cfg);
}

PulseScheduler::PulseScheduler(HapticConfig cfg) : cfg_(cfg) {
  cfg_.Validate();
}

void PulseScheduler::Reset() {
  in_breach_ = false;
  started_ = false;
}

double PulseScheduler::Update(double time, bool breached) {
  if (started_ && time < last_time_) {
    throw Error(ErrorCode::kInvalidArgument, "pulse timestamps went backwards");
  }
  started_ = true;
  last_time_ = time;
  if (!breached) {
    in_breach_ = false;
    return 0.0;
  }
  if (!in_breach_) {
    in_breach_ = true;
    window_start_ = time;
  }
  const double phase = time - window_start_;
  const double k = std::floor(phase / cfg_.pulse_period);
  if (k >= cfg_.max_pulses) return 0.0;
  const double within = phase - k * cfg_.pulse_period;
  return within < cfg_.pulse_duty * cfg_.pulse_period ? 1.0 : 0.0;
}

bool ZeroOrientationMember(
    const Vec3& qt, const std::function<EulerXYZ(const Vec3&)>& passive,
    double threshold) {
  try {
    return GeodesicAngle(passive(qt)) <= threshold;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoEquilibrium) return false;
    throw;
  }
}

}  // namespace cdpr
