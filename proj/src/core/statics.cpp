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
#include "cdpr/statics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cdpr/error.hpp"
#include "cdpr/nnls.hpp"

namespace cdpr {
namespace {

constexpr int kMaxNewtonIterations = 200;
constexpr double kTorqueTol = 1e-11;
constexpr double kMaxNewtonStep = 0.2;  // rad
constexpr double kPitchLimit = std::numbers::pi / 2.0 - 1e-3;

}  // namespace

Vector6 Wrench::AsVector() const {
  Vector6 w;
  w << force, torque;
  return w;
}

Wrench Wrench::FromVector(const Vector6& w) {
  return Wrench{w.head<3>(), w.tail<3>()};
}

WrenchMatrix StructureMatrix(const CdprGeometry& g, const Pose& p) {
  return -TwistJacobian(g, p).transpose();
}

Wrench WrenchFromTensions(const CdprGeometry& g, const Pose& p,
                          const TensionVector& f) {
  return Wrench::FromVector(StructureMatrix(g, p) * f);
}

TensionSolution DistributeTensions(const CdprGeometry& g, const Pose& p,
                                   const Wrench& desired,
                                   const StaticsConfig& cfg) {
  const Vector6 w = desired.AsVector();
  if (!w.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "desired wrench is not finite");
  }
  const WrenchMatrix a = StructureMatrix(g, p);
  // Shift so the floor tension becomes the origin: f = f_min + x, x >= 0.
  const Vector6 b = w - a * TensionVector::Constant(cfg.f_min);

  const NnlsResult feasible = SolveNnls(a, b);
  if (feasible.residual > cfg.wrench_tol) {
    std::ostringstream msg;
    msg << "wrench not achievable with tensions >= " << cfg.f_min
        << " N (residual " << feasible.residual << ")";
    throw Error(ErrorCode::kInfeasible, msg.str());
  }
  const Eigen::VectorXd x = MinNormNonnegative(a, b, feasible.x);

  TensionSolution sol;
  sol.tensions = TensionVector::Constant(cfg.f_min) + x;
  sol.residual = (a * sol.tensions - w).norm();
  if (sol.residual > cfg.wrench_tol) {
    // The min-norm polish drifted; the NNLS point is still a valid answer.
    sol.tensions = TensionVector::Constant(cfg.f_min) + feasible.x;
    sol.residual = (a * sol.tensions - w).norm();
  }
  sol.exceeds_max = sol.tensions.maxCoeff() > cfg.f_max;
  return sol;
}

Wrench GravityWrench(const Pose& p, const PlatformInertia& inertia) {
  Wrench w;
  w.force = Vec3(0.0, 0.0, -inertia.mass * kGravity);
  w.torque = (RotationXYZ(p.orientation) * inertia.center_of_mass).cross(w.force);
  return w;
}

TensionSolution GravityCompensation(const CdprGeometry& g, const Pose& p,
                                    const PlatformInertia& inertia,
                                    const StaticsConfig& cfg) {
  const Wrench grav = GravityWrench(p, inertia);
  return DistributeTensions(g, p, Wrench{-grav.force, -grav.torque}, cfg);
}

Vec3 NetTorque(const CdprGeometry& g, const Pose& p, const TensionVector& f,
               const PlatformInertia& inertia) {
  return WrenchFromTensions(g, p, f).torque + GravityWrench(p, inertia).torque;
}

Equilibrium PassiveOrientation(const CdprGeometry& g, const Vec3& qt,
                               const TensionVector& f,
                               const PlatformInertia& inertia,
                               const EulerXYZ& start) {
  auto torque = [&](const Vec3& o) {
    return NetTorque(g, Pose{qt, EulerXYZ::FromVector(o)}, f, inertia);
  };

  Vec3 o = start.AsVector();
  Vec3 tau = torque(o);
  Equilibrium eq;
  for (; eq.iterations < kMaxNewtonIterations; ++eq.iterations) {
    if (tau.norm() <= kTorqueTol) break;

    constexpr double h = 1e-7;
    Mat3 jac;
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = h;
      jac.col(k) = (torque(o + e) - torque(o - e)) / (2.0 * h);
    }
    Vec3 step = -jac.colPivHouseholderQr().solve(tau);
    if (!step.allFinite()) {
      throw Error(ErrorCode::kNoEquilibrium, "singular torque Jacobian");
    }
    if (step.norm() > kMaxNewtonStep) step *= kMaxNewtonStep / step.norm();

    double t = 1.0;
    Vec3 trial = o + step;
    Vec3 trial_tau = torque(trial);
    while (trial_tau.norm() >= (1.0 - 1e-4 * t) * tau.norm() && t > 1e-6) {
      t *= 0.5;
      trial = o + t * step;
      trial_tau = torque(trial);
    }
    if (trial_tau.norm() >= tau.norm()) {
      if (tau.norm() <= 1e-10) break;  // at the floating-point floor
      throw Error(ErrorCode::kNoEquilibrium, "line search stalled");
    }
    o = trial;
    tau = trial_tau;
    if (std::abs(o.y()) > kPitchLimit) {
      throw Error(ErrorCode::kNoEquilibrium, "orientation reached gimbal lock");
    }
  }
  if (tau.norm() > 1e-10) {
    throw Error(ErrorCode::kNoEquilibrium,
                "no torque equilibrium within iteration limit");
  }
  eq.orientation = EulerXYZ::FromVector(o);
  eq.torque_residual = tau.norm();
  return eq;
}

}  // namespace cdpr
