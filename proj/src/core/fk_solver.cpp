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
#include "cdpr/fk_solver.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cdpr/error.hpp"

namespace cdpr {
namespace {

constexpr int kMaxRejectionsPerIteration = 40;

Vector6 Clamp(const Vector6& q, const FkConfig& cfg) {
  return q.cwiseMax(cfg.bounds_lo).cwiseMin(cfg.bounds_hi);
}

}  // namespace

CableLengths ActualLengths(const CableAccounting& acc) {
  const CableLengths l = acc.l0 + acc.delta;
  for (int i = 0; i < kNumCables; ++i) {
    if (!(acc.l0[i] > 0.0) || !(l[i] > 0.0)) {
      throw Error(ErrorCode::kNonPositiveLength,
                  "cable " + std::to_string(i) + " length is not positive");
    }
  }
  return l;
}

FkConfig FkConfig::ForGeometry(const CdprGeometry& g) {
  constexpr double kMaxTilt = std::numbers::pi / 3.0;
  FkConfig cfg;
  cfg.bounds_lo << g.FrameLower(), Vec3::Constant(-kMaxTilt);
  cfg.bounds_hi << g.FrameUpper(), Vec3::Constant(kMaxTilt);
  return cfg;
}

void FkConfig::Validate() const {
  if (!(bounds_lo.array() < bounds_hi.array()).all()) {
    throw Error(ErrorCode::kInvalidArgument, "FK bounds must satisfy lo < hi");
  }
  if (!(residual_tol > 0.0) || !(step_tol > 0.0) || !(initial_damping > 0.0) ||
      max_iterations <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "FK tolerances, damping and iteration cap must be positive");
  }
}

FkSolution SolveForwardKinematics(const CdprGeometry& g, const CableLengths& l,
                                  const Pose& guess, const FkConfig& cfg) {
  cfg.Validate();
  Vector6 q = Clamp(guess.AsVector(), cfg);
  CableVector r = InverseKinematics(g, Pose::FromVector(q)) - l;
  double cost = r.squaredNorm();
  double lambda = cfg.initial_damping;

  FkSolution sol;
  sol.converged = std::sqrt(cost) <= cfg.residual_tol;
  while (!sol.converged && sol.iterations < cfg.max_iterations) {
    ++sol.iterations;
    const Jacobian j = LengthJacobian(g, Pose::FromVector(q));
    const Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
    const Vector6 grad = j.transpose() * r;
    const Vector6 scale = jtj.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    for (int k = 0; k < kMaxRejectionsPerIteration && !accepted; ++k) {
      Eigen::Matrix<double, 6, 6> a = jtj;
      a.diagonal() += lambda * scale;
      const Vector6 trial = Clamp(q - a.ldlt().solve(grad), cfg);
      const Vector6 step = trial - q;
      if (step.norm() <= cfg.step_tol * (q.norm() + cfg.step_tol)) {
        sol.converged = true;
        break;
      }
      CableVector trial_r;
      try {
        trial_r = InverseKinematics(g, Pose::FromVector(trial)) - l;
      } catch (const Error&) {
        lambda *= 10.0;
        continue;
      }
      const double trial_cost = trial_r.squaredNorm();
      if (trial_cost < cost) {
        q = trial;
        r = trial_r;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted && !sol.converged) break;
    if (std::sqrt(cost) <= cfg.residual_tol) sol.converged = true;
  }

  sol.pose = Pose::FromVector(q);
  sol.residual_norm = std::sqrt(cost);
  return sol;
}

void InitialGuessPolicy::Record(const FkSolution& s) {
  if (s.converged) {
    last_ = s.pose;
  } else {
    last_.reset();
  }
}

}  // namespace cdpr
