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

#include <array>
#include <filesystem>

#include <Eigen/Dense>

namespace cdpr {

inline constexpr int kNumCables = 8;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using CableVector = Eigen::Matrix<double, kNumCables, 1>;
using CableLengths = CableVector;
using Jacobian = Eigen::Matrix<double, kNumCables, 6>;

/// XYZ Euler angles (rad): R = Rx(rx) * Ry(ry) * Rz(rz).
struct EulerXYZ {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;

  Vec3 AsVector() const { return {rx, ry, rz}; }
  static EulerXYZ FromVector(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  bool operator==(const EulerXYZ&) const = default;
};

/// End-effector pose: translation of the RCM point in frame {0} plus the
/// platform orientation.
struct Pose {
  Vec3 translation = Vec3::Zero();
  EulerXYZ orientation;

  Vector6 AsVector() const;
  static Pose FromVector(const Vector6& q);
  bool operator==(const Pose& o) const {
    return translation == o.translation && orientation == o.orientation;
  }
};

/// Fixed frame outlets and platform attachment points of the 8 cables.
struct CdprGeometry {
  std::array<Vec3, kNumCables> frame_anchors;  // frame {0}, m
  std::array<Vec3, kNumCables> body_anchors;   // frame {1}, m

  // Throws kInvalidArgument on non-finite values, coincident frame anchors
  // or body anchors farther than `max_body_radius` from the RCM.
  void Validate(double max_body_radius = 0.2) const;

  Vec3 FrameLower() const;
  Vec3 FrameUpper() const;
  Vec3 FrameCenter() const { return 0.5 * (FrameLower() + FrameUpper()); }
  Pose CenterPose() const { return Pose{FrameCenter(), {}}; }
};

/// 0.7 m cubic frame (z in [0, 0.7]) with a 0.16 x 0.08 x 0.04 m platform.
/// Cables from the upper corners attach to the lower face of the platform and
/// vice versa, which gives rotational stiffness about all three axes.
CdprGeometry DefaultGeometry();

CdprGeometry LoadGeometry(const std::filesystem::path& path);
void SaveGeometry(const CdprGeometry& g, const std::filesystem::path& path);

Mat3 RotationXYZ(const EulerXYZ& o);

/// Maps Euler-angle rates to the angular velocity in frame {0}.
Mat3 EulerRateMap(const EulerXYZ& o);

/// Rotation angle of R(o) in [0, pi].
double GeodesicAngle(const EulerXYZ& o);

/// Vector from frame anchor to body anchor of cable number `cable` (1..8).
/// Array indices elsewhere are 0-based.
Vec3 CableSegment(const CdprGeometry& g, const Pose& p, int cable);

CableLengths InverseKinematics(const CdprGeometry& g, const Pose& p);

/// Rows [u_i^T, ((R B_i) x u_i)^T]: cable length rates per unit of linear
/// and angular velocity of the platform.
Jacobian TwistJacobian(const CdprGeometry& g, const Pose& p);

/// dl/dq with q = [translation; Euler angles].
Jacobian LengthJacobian(const CdprGeometry& g, const Pose& p);

}  // namespace cdpr
