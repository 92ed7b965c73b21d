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

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cdpr/fk_solver.hpp"

namespace cdpr {

/// Random poses: translation uniform within `translation_fraction` of the
/// frame half-extent about the center, each Euler angle uniform in
/// +/-max_angle.
struct PoseSampler {
  double translation_fraction = 0.6;
  double max_angle = 0.17453292519943295;  // 10 deg
};

std::vector<Pose> SamplePoses(const CdprGeometry& g, const PoseSampler& sampler,
                              int count, std::uint64_t seed);

struct FkBenchSpec {
  int trials = 2000;
  double noise_sigma = 1e-3;  // m, per cable
  std::uint64_t seed = 1;
  PoseSampler poses;
};

struct FkBenchReport {
  int trials = 0;
  int converged = 0;
  std::vector<double> errors;  // translation error per trial, m
  std::vector<int> iterations;
  double seconds = 0.0;

  /// Nearest-rank percentile of the translation error, p in [0, 100].
  double ErrorPercentile(double p) const;
  double FractionBelow(double threshold) const;
  double MedianIterations() const;
};

/// Cold-start FK (center pose guess) on IK lengths plus noise.
FkBenchReport RunFkBench(const CdprGeometry& g, const FkConfig& cfg,
                         const FkBenchSpec& spec);

void WriteFkBenchReport(std::ostream& out, const FkBenchSpec& spec,
                        const FkBenchReport& r);

}  // namespace cdpr
