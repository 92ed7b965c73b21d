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

#include <optional>

#include "cdpr/kinematics.hpp"

namespace cdpr {

/// Reference lengths plus encoder-measured changes.
struct CableAccounting {
  CableVector l0 = CableVector::Zero();
  CableVector delta = CableVector::Zero();
};

/// l = l0 + delta; throws kNonPositiveLength if any entry is <= 0.
CableLengths ActualLengths(const CableAccounting& acc);

struct FkConfig {
  Vector6 bounds_lo;
  Vector6 bounds_hi;
  int max_iterations = 100;
  double residual_tol = 1e-9;  // m
  double step_tol = 1e-10;     // relative to |q|
  double initial_damping = 1e-3;

  // Translation bounded by the frame box, orientation by +/-60 deg.
  static FkConfig ForGeometry(const CdprGeometry& g);
  void Validate() const;
};

struct FkSolution {
  Pose pose;
  double residual_norm = 0.0;  // |l - l_q(q)|, m
  int iterations = 0;
  bool converged = false;
};

/// Box-bounded Levenberg-Marquardt on |l - l_q(q)| over all six pose
/// coordinates. Steps are projected onto the bounds before evaluation; the
/// damping starts at `initial_damping`, x10 on rejection, /10 on acceptance.
/// Never throws kNotConverged: a non-converged result carries the best pose
/// found and `converged == false`. Degenerate cables propagate.
FkSolution SolveForwardKinematics(const CdprGeometry& g, const CableLengths& l,
                                  const Pose& guess, const FkConfig& cfg);

/// Warm-start bookkeeping for successive FK solves.
class InitialGuessPolicy {
 public:
  explicit InitialGuessPolicy(Pose center) : center_(center) {}

  /// Last converged pose, or the center pose with zero orientation.
  Pose Next() const { return last_.value_or(center_); }

  /// Records a solve; a diverged solve clears the warm start.
  void Record(const FkSolution& s);
  void Reset() { last_.reset(); }
  bool HasHistory() const { return last_.has_value(); }

 private:
  Pose center_;
  std::optional<Pose> last_;
};

}  // namespace cdpr
