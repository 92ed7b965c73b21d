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

#include <numbers>
#include <random>

#include "cdpr/error.hpp"
#include "cdpr/kinematics.hpp"
#include "oracle.hpp"

using namespace cdpr;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

double MaxDiff(const Mat3& a, const oracle::M3& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a(i, j) - b[i][j]));
  return m;
}

CableLengths FiniteDifferenceColumn(const CdprGeometry& g, const Pose& p, int k,
                                    double h) {
  Vector6 q = p.AsVector();
  Vector6 qp = q, qm = q;
  qp[k] += h;
  qm[k] -= h;
  return (InverseKinematics(g, Pose::FromVector(qp)) -
          InverseKinematics(g, Pose::FromVector(qm))) / (2.0 * h);
}

}  // namespace

TEST_CASE("rotation: zero angles give the identity") {
  CHECK(RotationXYZ({0, 0, 0}).isApprox(Mat3::Identity(), 0.0));
}

TEST_CASE("rotation: quarter turn about x maps y onto z") {
  const Vec3 v = RotationXYZ({kPi / 2, 0, 0}) * Vec3(0, 1, 0);
  CHECK((v - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("rotation: 10/20/30 deg matches the composed axis matrices") {
  const Mat3 r = RotationXYZ({10 * kDeg, 20 * kDeg, 30 * kDeg});
  CHECK(MaxDiff(r, oracle::Rotation(10 * kDeg, 20 * kDeg, 30 * kDeg)) < 1e-12);
}

TEST_CASE("rotation: orthonormal with unit determinant over 1e5 inputs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  double worst = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const Mat3 r = RotationXYZ({u(rng), u(rng) / 2.0, u(rng)});
    worst = std::max(worst, (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(r.determinant() - 1.0));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("geodesic angle equals acos((tr R - 1) / 2)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int n = 0; n < 200; ++n) {
    const EulerXYZ o{u(rng), u(rng), u(rng)};
    CHECK(GeodesicAngle(o) == doctest::Approx(oracle::GeodesicAngle(o.rx, o.ry, o.rz)).epsilon(1e-12));
  }
  CHECK(GeodesicAngle({0.3, 0, 0}) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("cable segment: degenerate anchors return the translation") {
  CdprGeometry g = DefaultGeometry();
  g.frame_anchors[2] = Vec3::Zero();
  g.body_anchors[2] = Vec3::Zero();
  const Pose p{{1, 2, 3}, {0.1, 0.2, 0.3}};
  CHECK(CableSegment(g, p, 3) == Vec3(1, 2, 3));
}

TEST_CASE("cable segment: zero orientation is q_t + B_i - A_i exactly") {
  const CdprGeometry g = DefaultGeometry();
  const Pose p{{0.05, -0.02, 0.31}, {}};
  for (int i = 0; i < kNumCables; ++i) {
    const Vec3 expected = p.translation + g.body_anchors[i] - g.frame_anchors[i];
    CHECK(CableSegment(g, p, i + 1) == expected);
  }
}

TEST_CASE("cable segment: random poses match the direct formula") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int n = 0; n < 100; ++n) {
    CdprGeometry g = DefaultGeometry();
    for (int i = 0; i < kNumCables; ++i) {
      g.frame_anchors[i] += Vec3(u(rng), u(rng), u(rng)) * 0.1;
      g.body_anchors[i] = Vec3(u(rng), u(rng), u(rng)) * 0.3;
    }
    const Pose p = oracle::RandomPose(rng, 0.8, 0.6);
    for (int i = 0; i < kNumCables; ++i) {
      const oracle::V3 e = oracle::Segment(g, p, i);
      const Vec3 v = CableSegment(g, p, i + 1);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(v[k] - e[k]) < 1e-12);
    }
  }
}

TEST_CASE("cable segment: cable numbers outside 1..8 are rejected") {
  const CdprGeometry g = DefaultGeometry();
  for (int bad : {0, 9, -1}) {
    try {
      CableSegment(g, g.CenterPose(), bad);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIndexOutOfRange);
    }
  }
}

TEST_CASE("inverse kinematics: all lengths equal at the center") {
  const CdprGeometry g = DefaultGeometry();
  const CableLengths l = InverseKinematics(g, g.CenterPose());
  CHECK(l.maxCoeff() - l.minCoeff() < 1e-15);
  CHECK(l.minCoeff() > 0.0);
}

TEST_CASE("inverse kinematics: +x translation matches per-cable distances") {
  const CdprGeometry g = DefaultGeometry();
  for (double d : {0.01, 0.05, 0.12}) {
    const Pose p{g.FrameCenter() + Vec3(d, 0, 0), {}};
    const CableLengths l = InverseKinematics(g, p);
    const auto e = oracle::Lengths(g, p);
    for (int i = 0; i < kNumCables; ++i) CHECK(std::abs(l[i] - e[i]) < 1e-12);
  }
}

TEST_CASE("inverse kinematics: coincident anchors raise DegenerateCable") {
  const CdprGeometry g = DefaultGeometry();
  const Pose p{g.frame_anchors[4] - g.body_anchors[4], {}};
  try {
    InverseKinematics(g, p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateCable);
  }
}

TEST_CASE("inverse kinematics: invariant under a rigid translation of the scene") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    const CdprGeometry g = DefaultGeometry();
    const Pose p = oracle::RandomPose(rng);
    const Vec3 shift(0.3 * n, -1.7, 2.2);
    CdprGeometry moved = g;
    for (auto& a : moved.frame_anchors) a += shift;
    Pose q = p;
    q.translation += shift;
    CHECK((InverseKinematics(g, p) - InverseKinematics(moved, q)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("inverse kinematics: mirroring across x = 0 swaps the x-paired cables") {
  // Frame anchors 0..3 sit at x = -0.35 and 4..7 at x = +0.35 with matching
  // y and z, so the mirror image of cable i is cable i ^ 4. Reflection maps
  // Rx(a)Ry(b)Rz(c) to Rx(a)Ry(-b)Rz(-c).
  const CdprGeometry g = DefaultGeometry();
  std::mt19937_64 rng(9);
  for (int n = 0; n < 200; ++n) {
    const Pose p = oracle::RandomPose(rng);
    Pose m = p;
    m.translation.x() = -p.translation.x();
    m.orientation = {p.orientation.rx, -p.orientation.ry, -p.orientation.rz};
    const CableLengths a = InverseKinematics(g, p);
    const CableLengths b = InverseKinematics(g, m);
    for (int i = 0; i < kNumCables; ++i) CHECK(std::abs(a[i] - b[i ^ 4]) < 1e-12);
  }
}

TEST_CASE("jacobian: matches central finite differences") {
  const CdprGeometry g = DefaultGeometry();
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const Pose p = oracle::RandomPose(rng);
    const Jacobian j = LengthJacobian(g, p);
    for (int k = 0; k < 6; ++k) {
      worst = std::max(worst, (j.col(k) - FiniteDifferenceColumn(g, p, k, 1e-6)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("jacobian: point platform has zero orientation columns") {
  CdprGeometry g = DefaultGeometry();
  for (auto& b : g.body_anchors) b.setZero();
  const Jacobian j = LengthJacobian(g, Pose{{0.03, -0.04, 0.3}, {}});
  CHECK(j.rightCols<3>().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobian: translation rows are unit cable directions") {
  const CdprGeometry g = DefaultGeometry();
  std::mt19937_64 rng(4);
  for (int n = 0; n < 50; ++n) {
    const Pose p = oracle::RandomPose(rng);
    const Jacobian j = LengthJacobian(g, p);
    for (int i = 0; i < kNumCables; ++i) {
      CHECK(std::abs(j.row(i).head<3>().norm() - 1.0) < 1e-14);
      const oracle::V3 s = oracle::Segment(g, p, i);
      const double n2 = oracle::Norm(s);
      for (int k = 0; k < 3; ++k) CHECK(std::abs(j(i, k) - s[k] / n2) < 1e-14);
    }
  }
}

TEST_CASE("jacobian: twist and length forms agree at zero orientation") {
  const CdprGeometry g = DefaultGeometry();
  const Pose p{{0.02, 0.05, 0.33}, {}};
  CHECK((TwistJacobian(g, p) - LengthJacobian(g, p)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("geometry: validation rejects coincident frame anchors and large bodies") {
  CdprGeometry g = DefaultGeometry();
  CHECK_NOTHROW(g.Validate());
  g.frame_anchors[1] = g.frame_anchors[0];
  CHECK_THROWS_AS(g.Validate(), Error);
  g = DefaultGeometry();
  g.body_anchors[0] = Vec3(0.3, 0, 0);
  CHECK_THROWS_AS(g.Validate(), Error);
}

TEST_CASE("geometry: default rig frame box and center") {
  const CdprGeometry g = DefaultGeometry();
  CHECK(g.FrameLower() == Vec3(-0.35, -0.35, 0.0));
  CHECK(g.FrameUpper() == Vec3(0.35, 0.35, 0.7));
  CHECK(g.FrameCenter() == Vec3(0.0, 0.0, 0.35));
}
