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

#include <functional>
#include <numbers>

#include "cdpr/kinematics.hpp"
#include "cdpr/statics.hpp"

namespace cdpr {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Axis-aligned ellipsoid bounding the near-zero-orientation region.
struct VirtualWall {
  Vec3 center = Vec3::Zero();
  Vec3 radii = Vec3::Ones();
  double orientation_threshold = 10.0 * kDegToRad;

  void Validate() const;
};

struct HapticConfig {
  double gain = 5.0;           // repulsion magnitude, N
  double pulse_period = 0.6;   // s
  double pulse_duty = 0.5;
  int max_pulses = 3;          // per breach window

  void Validate() const;
};

/// Ellipsoid quadratic form; <= 1 inside.
double WallValue(const VirtualWall& w, const Vec3& qt);

/// Task-space demand [force; 0]: zero inside the wall, otherwise `gain`
/// along the unit vector from qt toward the wall center. Throws kAtCenter
/// when qt is the center.
Vector6 RepulsionDemand(const VirtualWall& w, const Vec3& qt,
                        const HapticConfig& cfg);

/// Tensions realizing the demand on top of gravity compensation.
TensionSolution HapticTensions(const CdprGeometry& g, const Pose& p,
                               const Vector6& demand,
                               const PlatformInertia& inertia,
                               const StaticsConfig& cfg = {});

/// Square-wave modulation of the repulsion component during a breach.
///
/// A breach window opens on the first breached sample and closes on the
/// first sample back inside. Within a window, burst k covers
/// [k*period, k*period + duty*period) relative to the window start, for
/// k < max_pulses; the factor is 0 otherwise.
class PulseScheduler {
 public:
  explicit PulseScheduler(HapticConfig cfg);

  /// Returns 1 during a burst, else 0. Timestamps must not decrease.
  double Update(double time, bool breached);

  bool in_breach() const { return in_breach_; }
  void Reset();

 private:
  HapticConfig cfg_;
  bool in_breach_ = false;
  bool started_ = false;
  double window_start_ = 0.0;
  double last_time_ = 0.0;
};

/// True iff the passive orientation at qt stays within `threshold` (rad,
/// geodesic). A failed equilibrium solve counts as a non-member.
bool ZeroOrientationMember(
    const Vec3& qt, const std::function<EulerXYZ(const Vec3&)>& passive,
    double threshold);

}  // namespace cdpr
