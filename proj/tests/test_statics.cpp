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

#include <random>

#include "cdpr/error.hpp"
#include "cdpr/haptics.hpp"
#include "cdpr/nnls.hpp"
#include "cdpr/statics.hpp"
#include "oracle.hpp"

using namespace cdpr;

namespace {

// Cable i pulls the body toward its frame anchor: force -f_i u_i applied at
// R B_i. Gravity acts at R c.
std::array<double, 6> OracleWrench(const CdprGeometry& g, const Pose& p,
                                   const TensionVector& f) {
  const oracle::M3 r = oracle::Rotation(p.orientation.rx, p.orientation.ry, p.orientation.rz);
  std::array<double, 6> w{};
  for (int i = 0; i < kNumCables; ++i) {
    const oracle::V3 s = oracle::Segment(g, p, i);
    const double n = oracle::Norm(s);
    const oracle::V3 force{-f[i] * s[0] / n, -f[i] * s[1] / n, -f[i] * s[2] / n};
    const oracle::V3 arm = oracle::Apply(r, oracle::ToArray(g.body_anchors[i]));
    w[0] += force[0];
    w[1] += force[1];
    w[2] += force[2];
    w[3] += arm[1] * force[2] - arm[2] * force[1];
    w[4] += arm[2] * force[0] - arm[0] * force[2];
    w[5] += arm[0] * force[1] - arm[1] * force[0];
  }
  return w;
}

double OracleNetTorque(const CdprGeometry& g, const Pose& p, const TensionVector& f,
                       double mass) {
  const auto w = OracleWrench(g, p, f);
  (void)mass;  // gravity acts at the RCM for a centred mass: no moment
  return std::sqrt(w[3] * w[3] + w[4] * w[4] + w[5] * w[5]);
}

// Brute-force NNLS: least squares on every passive set, keep the best
// nonnegative candidate.
double BruteNnlsResidual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  double best = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int k = 0; k < n; ++k)
      if (mask & (1 << k)) idx.push_back(k);
    Eigen::MatrixXd sub(a.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(k) = a.col(idx[k]);
    const Eigen::VectorXd x = sub.completeOrthogonalDecomposition().solve(b);
    if ((x.array() < -1e-12).any()) continue;
    best = std::min(best, (sub * x - b).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("wrench: zero tensions give zero wrench") {
  const CdprGeometry g = DefaultGeometry();
  const Wrench w = WrenchFromTensions(g, Pose{{0.1, 0, 0.3}, {0.1, 0, 0}}, TensionVector::Zero());
  CHECK(w.AsVector().isZero(0.0));
}

TEST_CASE("wrench: uniform tensions cancel at the center of the symmetric rig") {
  const CdprGeometry g = DefaultGeometry();
  const Wrench w = WrenchFromTensions(g, g.CenterPose(), TensionVector::Constant(3.0));
  CHECK(w.AsVector().cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("wrench: random cases match a direct per-cable summation") {
  const CdprGeometry g = DefaultGeometry();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int n = 0; n < 100; ++n) {
    const Pose p = oracle::RandomPose(rng);
    TensionVector f;
    for (int i = 0; i < kNumCables; ++i) f[i] = u(rng);
    const Vector6 w = WrenchFromTensions(g, p, f).AsVector();
    const auto e = OracleWrench(g, p, f);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(w[k] - e[k]) < 1e-12);
  }
}

TEST_CASE("nnls: agrees with brute-force enumeration of passive sets") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  for (int n = 0; n < 200; ++n) {
    const int rows = 3 + n % 4;
    const int cols = 2 + n % 5;
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
      b[i] = nd(rng);
      for (int j = 0; j < cols; ++j) a(i, j) = nd(rng);
    }
    const NnlsResult r = SolveNnls(a, b);
    CHECK((r.x.array() >= 0.0).all());
    CHECK(r.residual == doctest::Approx((a * r.x - b).norm()).epsilon(1e-9));
    CHECK(r.residual <= BruteNnlsResidual(a, b) + 1e-9);
  }
}

TEST_CASE("tensions: zero wrench at the center gives the floor tension on every cable") {
  const CdprGeometry g = DefaultGeometry();
  const StaticsConfig cfg;
  const TensionSolution s = DistributeTensions(g, g.CenterPose(), Wrench{}, cfg);
  CHECK((s.tensions - TensionVector::Constant(cfg.f_min)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensions: round trip of reachable wrenches, floor respected, minimum norm") {
  const CdprGeometry g = DefaultGeometry();
  const StaticsConfig cfg;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  for (int n = 0; n < 200; ++n) {
    const Pose p = oracle::RandomPose(rng, 0.5, 0.1);
    // Any wrench generated by tensions >= f_min is reachable by construction.
    TensionVector gen;
    for (int i = 0; i < kNumCables; ++i) gen[i] = cfg.f_min + u(rng);
    const auto target = OracleWrench(g, p, gen);
    Wrench desired;
    desired.force = {target[0], target[1], target[2]};
    desired.torque = {target[3], target[4], target[5]};
    const TensionSolution s = DistributeTensions(g, p, desired, cfg);
    const auto achieved = OracleWrench(g, p, s.tensions);
    double residual = 0.0;
    for (int k = 0; k < 6; ++k) residual += (achieved[k] - target[k]) * (achieved[k] - target[k]);
    CHECK(std::sqrt(residual) < 1e-6);
    CHECK(s.tensions.minCoeff() >= cfg.f_min);
    const TensionVector floor = TensionVector::Constant(cfg.f_min);
    CHECK((s.tensions - floor).norm() <= (gen - floor).norm() + 1e-9);
  }
}

TEST_CASE("tensions: outward force far from the center is infeasible") {
  const CdprGeometry g = DefaultGeometry();
  const Pose p{{0.33, 0.0, 0.35}, {}};
  Wrench desired;
  desired.force = {5.0, 0.0, 0.0};
  try {
    DistributeTensions(g, p, desired);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("gravity compensation: zero mass reduces to the floor tension") {
  const CdprGeometry g = DefaultGeometry();
  PlatformInertia inertia;
  inertia.mass = 0.0;
  const TensionSolution s = GravityCompensation(g, g.CenterPose(), inertia);
  CHECK((s.tensions - TensionVector::Ones()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gravity compensation: 328 g platform nets zero wrench at the center") {
  const CdprGeometry g = DefaultGeometry();
  const PlatformInertia inertia;  // 0.328 kg at the RCM
  CHECK(inertia.mass == 0.328);
  const TensionSolution s = GravityCompensation(g, g.CenterPose(), inertia);
  auto w = OracleWrench(g, g.CenterPose(), s.tensions);
  w[2] -= 0.328 * 9.81;
  double net = 0.0;
  for (double v : w) net += v * v;
  CHECK(std::sqrt(net) < 1e-6);
  CHECK(s.tensions.minCoeff() >= 1.0);
}

TEST_CASE("gravity compensation: near the top face it is infeasible or flagged") {
  const CdprGeometry g = DefaultGeometry();
  const Pose p{{0.2, 0.2, 0.68}, {}};
  bool flagged = false;
  try {
    flagged = GravityCompensation(g, p, PlatformInertia{}).exceeds_max;
  } catch (const Error& e) {
    flagged = e.code() == ErrorCode::kInfeasible;
  }
  CHECK(flagged);
  // On the central axis the peak tension still grows toward the top.
  double previous = 0.0;
  for (double z = 0.4; z < 0.695; z += 0.01) {
    const double peak = GravityCompensation(g, Pose{{0, 0, z}, {}}, PlatformInertia{}).tensions.maxCoeff();
    CHECK(peak > previous);
    previous = peak;
  }
}

TEST_CASE("passive orientation: zero at the symmetric center") {
  const CdprGeometry g = DefaultGeometry();
  const PlatformInertia inertia;
  const TensionVector f = GravityCompensation(g, g.CenterPose(), inertia).tensions;
  const Equilibrium eq = PassiveOrientation(g, g.FrameCenter(), f, inertia);
  CHECK(GeodesicAngle(eq.orientation) < 1e-9);
  const Equilibrium eq2 = PassiveOrientation(g, g.FrameCenter(), TensionVector::Constant(2.0), inertia);
  CHECK(GeodesicAngle(eq2.orientation) < 1e-9);
}

TEST_CASE("passive orientation: converged outputs have torque residual below 1e-9") {
  const CdprGeometry g = DefaultGeometry();
  const PlatformInertia inertia;
  const TensionVector f = GravityCompensation(g, g.CenterPose(), inertia).tensions;
  std::mt19937_64 rng(70);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  int solved = 0;
  for (int n = 0; n < 100; ++n) {
    const Vec3 qt = g.FrameCenter() + Vec3(u(rng), u(rng), u(rng));
    try {
      const Equilibrium eq = PassiveOrientation(g, qt, f, inertia);
      ++solved;
      CHECK(OracleNetTorque(g, Pose{qt, eq.orientation}, f, inertia.mass) < 1e-9);
      CHECK(eq.torque_residual < 1e-9);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNoEquilibrium);
    }
  }
  CHECK(solved > 90);
}

TEST_CASE("passive orientation: grows monotonically along a ray toward a corner") {
  const CdprGeometry g = DefaultGeometry();
  const PlatformInertia inertia;
  const TensionVector f = GravityCompensation(g, g.CenterPose(), inertia).tensions;
  const Vec3 dir = Vec3(1, 1, 1).normalized();
  double previous = 0.0;
  EulerXYZ start;
  for (int k = 1; k <= 5; ++k) {
    const Vec3 qt = g.FrameCenter() + dir * (0.04 * k);
    const Equilibrium eq = PassiveOrientation(g, qt, f, inertia, start);
    const double angle = GeodesicAngle(eq.orientation);
    CHECK(angle > previous);
    previous = angle;
    start = eq.orientation;
  }
}

TEST_CASE("passive orientation: no jumps above 5 deg between 1 mm steps") {
  const CdprGeometry g = DefaultGeometry();
  const PlatformInertia inertia;
  const TensionVector f = GravityCompensation(g, g.CenterPose(), inertia).tensions;
  const Vec3 a = g.FrameCenter() + Vec3(-0.15, -0.1, -0.1);
  const Vec3 b = g.FrameCenter() + Vec3(0.15, 0.12, 0.1);
  const int steps = static_cast<int>((b - a).norm() / 1e-3);
  EulerXYZ start;
  Mat3 previous = Mat3::Identity();
  bool first = true;
  double worst = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const Vec3 qt = a + (b - a) * (static_cast<double>(k) / steps);
    const Equilibrium eq = PassiveOrientation(g, qt, f, inertia, start);
    if (GeodesicAngle(eq.orientation) > 10.0 * kDegToRad) continue;
    const Mat3 r = RotationXYZ(eq.orientation);
    if (!first) {
      const double c = ((previous.transpose() * r).trace() - 1.0) / 2.0;
      worst = std::max(worst, std::acos(std::clamp(c, -1.0, 1.0)));
    }
    first = false;
    previous = r;
    start = eq.orientation;
  }
  CHECK(worst < 5.0 * kDegToRad);
}
