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
#include "cdpr/nnls.hpp"

#include <algorithm>
#include <vector>

namespace cdpr {
namespace {

Eigen::MatrixXd Columns(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out.col(k) = a.col(idx[k]);
  return out;
}

// Minimum-norm least-squares solution of a z = b.
Eigen::VectorXd LeastSquares(const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& b) {
  return a.completeOrthogonalDecomposition().solve(b);
}

}  // namespace

NnlsResult SolveNnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.cols();
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) *
                     std::max(1.0, b.cwiseAbs().maxCoeff());
  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);

  const int max_outer = static_cast<int>(3 * n + 10);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * res.x);
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    }
    if (t < 0) break;
    passive[t] = true;
    ++res.iterations;

    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<int> p;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j]) p.push_back(static_cast<int>(j));
      }
      const Eigen::VectorXd zp = LeastSquares(Columns(a, p), b);
      bool all_positive = true;
      for (size_t k = 0; k < p.size(); ++k) {
        if (zp[k] <= 0.0) all_positive = false;
      }
      if (all_positive) {
        res.x.setZero();
        for (size_t k = 0; k < p.size(); ++k) res.x[p[k]] = zp[k];
        break;
      }
      double alpha = 1.0;
      for (size_t k = 0; k < p.size(); ++k) {
        if (zp[k] <= 0.0) {
          const double xj = res.x[p[k]];
          alpha = std::min(alpha, xj / (xj - zp[k]));
        }
      }
      for (size_t k = 0; k < p.size(); ++k) {
        res.x[p[k]] += alpha * (zp[k] - res.x[p[k]]);
        if (res.x[p[k]] <= tol) {
          res.x[p[k]] = 0.0;
          passive[p[k]] = false;
        }
      }
    }
  }
  res.residual = (a * res.x - b).norm();
  return res;
}

Eigen::VectorXd MinNormNonnegative(const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& b,
                                   Eigen::VectorXd x) {
  const Eigen::Index n = a.cols();
  x = x.cwiseMax(0.0);
  std::vector<bool> bound(n);
  for (Eigen::Index i = 0; i < n; ++i) bound[i] = x[i] == 0.0;

  for (int it = 0; it < 10 * n + 20; ++it) {
    std::vector<int> free, fixed;
    for (Eigen::Index i = 0; i < n; ++i) {
      (bound[i] ? fixed : free).push_back(static_cast<int>(i));
    }
    if (free.empty()) return Eigen::VectorXd::Zero(n);

    const Eigen::MatrixXd af = Columns(a, free);
    const Eigen::VectorXd y = LeastSquares(af, b);
    Eigen::VectorXd p(free.size());
    for (size_t k = 0; k < free.size(); ++k) p[k] = y[k] - x[free[k]];

    if (p.norm() <= 1e-14 * (1.0 + x.norm())) {
      // Stationary on this face: check the bound multipliers.
      const Eigen::VectorXd nu = LeastSquares(af.transpose(), y);
      int drop = -1;
      double most_negative = -1e-12;
      for (int i : fixed) {
        const double mu = -a.col(i).dot(nu);
        if (mu < most_negative) {
          most_negative = mu;
          drop = i;
        }
      }
      if (drop < 0) break;
      bound[drop] = false;
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (size_t k = 0; k < free.size(); ++k) {
      if (p[k] < 0.0) {
        const double ratio = -x[free[k]] / p[k];
        if (ratio < alpha) {
          alpha = ratio;
          blocking = free[k];
        }
      }
    }
    for (size_t k = 0; k < free.size(); ++k) x[free[k]] += alpha * p[k];
    if (blocking >= 0) {
      x[blocking] = 0.0;
      bound[blocking] = true;
    }
  }
  return x.cwiseMax(0.0);
}

}  // namespace cdpr
