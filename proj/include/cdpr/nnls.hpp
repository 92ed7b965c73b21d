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

#include <Eigen/Dense>

namespace cdpr {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // |a x - b|
  int iterations = 0;
};

// Lawson-Hanson active-set solver for min |a x - b| subject to x >= 0.
NnlsResult SolveNnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Minimum-norm point of {x : a x = b, x >= 0}, by a primal active-set
// method started from the feasible point `x0` (e.g. an NNLS solution with
// zero residual). The returned x is elementwise >= 0.
Eigen::VectorXd MinNormNonnegative(const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& b,
                                   Eigen::VectorXd x0);

}  // namespace cdpr
