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

#include "cdpr/kinematics.hpp"

namespace cdpr {

inline constexpr double kGravity = 9.81;  // m/s^2, along -z of frame {0}

using TensionVector = CableVector;
using WrenchMatrix = Eigen::Matrix<double, 6, kNumCables>;

/// Force (N) and torque about the RCM point (N m), frame {0}.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Vector6 AsVector() const;
  static Wrench FromVector(const Vector6& w);
};

struct PlatformInertia {
  double mass = 0.328;                      // kg, gimbal manipulator
  Vec3 center_of_mass = Vec3::Zero();       // frame {1}
};

struct StaticsConfig {
  double f_min = 1.0;           // N
  double f_max = 25.0;          // N, above this a solution is flagged
  double wrench_tol = 1e-6;     // N / N m
};

struct TensionSolution {
  TensionVector tensions = TensionVector::Zero();
  double residual = 0.0;        // |achieved - desired|
  bool exceeds_max = false;
};

/// Column i is the wrench exerted by a unit tension in cable i, i.e. the
/// columns of -J^T for the twist Jacobian.
WrenchMatrix StructureMatrix(const CdprGeometry& g, const Pose& p);

Wrench WrenchFromTensions(const CdprGeometry& g, const Pose& p,
                          const TensionVector& f);

/// Minimum |f - f_min| tensions realizing `desired` with every f_i >= f_min.
/// Throws kInfeasible when the best achievable residual exceeds wrench_tol.
TensionSolution DistributeTensions(const CdprGeometry& g, const Pose& p,
                                   const Wrench& desired,
                                   const StaticsConfig& cfg = {});

/// Wrench gravity applies to the platform at pose `p`.
Wrench GravityWrench(const Pose& p, const PlatformInertia& inertia);

TensionSolution GravityCompensation(const CdprGeometry& g, const Pose& p,
                                    const PlatformInertia& inertia,
                                    const StaticsConfig& cfg = {});

/// Torque about the RCM from fixed cable tensions plus gravity.
Vec3 NetTorque(const CdprGeometry& g, const Pose& p, const TensionVector& f,
               const PlatformInertia& inertia);

struct Equilibrium {
  EulerXYZ orientation;
  double torque_residual = 0.0;  // N m
  int iterations = 0;
};

/// Orientation at which the net torque about the RCM vanishes for tensions
/// `f` held fixed, found by damped Newton from `start`. Throws
/// kNoEquilibrium after 200 iterations or on a stalled line search.
Equilibrium PassiveOrientation(const CdprGeometry& g, const Vec3& qt,
                               const TensionVector& f,
                               const PlatformInertia& inertia,
                               const EulerXYZ& start = {});

}  // namespace cdpr
