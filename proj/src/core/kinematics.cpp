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
#include "cdpr/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "cdpr/error.hpp"
#include "cdpr/serialization.hpp"

namespace cdpr {
namespace {

constexpr double kDegenerateLength = 1e-9;

}  // namespace

Vector6 Pose::AsVector() const {
  Vector6 q;
  q << translation, orientation.AsVector();
  return q;
}

Pose Pose::FromVector(const Vector6& q) {
  return Pose{q.head<3>(), EulerXYZ::FromVector(q.tail<3>())};
}

void CdprGeometry::Validate(double max_body_radius) const {
  for (int i = 0; i < kNumCables; ++i) {
    if (!frame_anchors[i].allFinite() || !body_anchors[i].allFinite()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "anchor " + std::to_string(i) + " is not finite");
    }
    if (body_anchors[i].norm() >= max_body_radius) {
      throw Error(ErrorCode::kInvalidArgument,
                  "body anchor " + std::to_string(i) + " lies outside " +
                      std::to_string(max_body_radius) + " m of the RCM");
    }
    for (int j = 0; j < i; ++j) {
      if ((frame_anchors[i] - frame_anchors[j]).norm() < 1e-9) {
        throw Error(ErrorCode::kInvalidArgument,
                    "frame anchors " + std::to_string(j) + " and " +
                        std::to_string(i) + " coincide");
      }
    }
  }
}

Vec3 CdprGeometry::FrameLower() const {
  Vec3 lo = frame_anchors[0];
  for (const auto& a : frame_anchors) lo = lo.cwiseMin(a);
  return lo;
}

Vec3 CdprGeometry::FrameUpper() const {
  Vec3 hi = frame_anchors[0];
  for (const auto& a : frame_anchors) hi = hi.cwiseMax(a);
  return hi;
}

CdprGeometry DefaultGeometry() {
  constexpr double kHalfFrame = 0.35;
  const Vec3 center(0.0, 0.0, kHalfFrame);
  const Vec3 body_half(0.08, 0.04, -0.02);
  CdprGeometry g;
  int i = 0;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (int sz : {-1, 1}) {
        const Vec3 s(sx, sy, sz);
        g.frame_anchors[i] = center + kHalfFrame * s;
        g.body_anchors[i] = body_half.cwiseProduct(s);
        ++i;
      }
    }
  }
  return g;
}

CdprGeometry LoadGeometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  CdprGeometry g = GeometryFromJson(j);
  g.Validate();
  return g;
}

void SaveGeometry(const CdprGeometry& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << GeometryToJson(g).dump(2) << "\n";
}

Mat3 RotationXYZ(const EulerXYZ& o) {
  const Mat3 rx = Eigen::AngleAxisd(o.rx, Vec3::UnitX()).toRotationMatrix();
  const Mat3 ry = Eigen::AngleAxisd(o.ry, Vec3::UnitY()).toRotationMatrix();
  const Mat3 rz = Eigen::AngleAxisd(o.rz, Vec3::UnitZ()).toRotationMatrix();
  return rx * ry * rz;
}

Mat3 EulerRateMap(const EulerXYZ& o) {
  // omega = rx_dot * ex + ry_dot * Rx ey + rz_dot * Rx Ry ez
  const Mat3 rx = Eigen::AngleAxisd(o.rx, Vec3::UnitX()).toRotationMatrix();
  const Mat3 ry = Eigen::AngleAxisd(o.ry, Vec3::UnitY()).toRotationMatrix();
  Mat3 e;
  e.col(0) = Vec3::UnitX();
  e.col(1) = rx * Vec3::UnitY();
  e.col(2) = rx * ry * Vec3::UnitZ();
  return e;
}

double GeodesicAngle(const EulerXYZ& o) {
  const double c = 0.5 * (RotationXYZ(o).trace() - 1.0);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

Vec3 CableSegment(const CdprGeometry& g, const Pose& p, int cable) {
  if (cable < 1 || cable > kNumCables) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "cable number " + std::to_string(cable) + " not in 1..8");
  }
  const int i = cable - 1;
  return p.translation + RotationXYZ(p.orientation) * g.body_anchors[i] -
         g.frame_anchors[i];
}

CableLengths InverseKinematics(const CdprGeometry& g, const Pose& p) {
  const Mat3 r = RotationXYZ(p.orientation);
  CableLengths l;
  for (int i = 0; i < kNumCables; ++i) {
    const Vec3 ab = p.translation + r * g.body_anchors[i] - g.frame_anchors[i];
    l[i] = ab.norm();
    if (!(l[i] >= kDegenerateLength)) {
      throw Error(ErrorCode::kDegenerateCable,
                  "cable " + std::to_string(i) + " has zero length");
    }
  }
  return l;
}

Jacobian TwistJacobian(const CdprGeometry& g, const Pose& p) {
  const Mat3 r = RotationXYZ(p.orientation);
  Jacobian j;
  for (int i = 0; i < kNumCables; ++i) {
    const Vec3 rb = r * g.body_anchors[i];
    const Vec3 ab = p.translation + rb - g.frame_anchors[i];
    const double len = ab.norm();
    if (!(len >= kDegenerateLength)) {
      throw Error(ErrorCode::kDegenerateCable,
                  "cable " + std::to_string(i) + " has zero length");
    }
    const Vec3 u = ab / len;
    j.block<1, 3>(i, 0) = u.transpose();
    j.block<1, 3>(i, 3) = rb.cross(u).transpose();
  }
  return j;
}

Jacobian LengthJacobian(const CdprGeometry& g, const Pose& p) {
  Jacobian j = TwistJacobian(g, p);
  j.rightCols<3>() = j.rightCols<3>() * EulerRateMap(p.orientation);
  return j;
}

}  // namespace cdpr
