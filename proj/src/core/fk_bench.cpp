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
#include "cdpr/fk_bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "cdpr/error.hpp"
#include "cdpr/sim.hpp"

namespace cdpr {

std::vector<Pose> SamplePoses(const CdprGeometry& g, const PoseSampler& sampler,
                              int count, std::uint64_t seed) {
  if (count < 0 || !(sampler.translation_fraction >= 0.0) ||
      !(sampler.max_angle >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid pose sampler");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 c = g.FrameCenter();
  const Vec3 half = 0.5 * sampler.translation_fraction * (g.FrameUpper() - g.FrameLower());
  std::vector<Pose> poses;
  poses.reserve(count);
  for (int k = 0; k < count; ++k) {
    Pose p;
    for (int i = 0; i < 3; ++i) p.translation[i] = c[i] + half[i] * u(rng);
    p.orientation.rx = sampler.max_angle * u(rng);
    p.orientation.ry = sampler.max_angle * u(rng);
    p.orientation.rz = sampler.max_angle * u(rng);
    poses.push_back(p);
  }
  return poses;
}

double FkBenchReport::ErrorPercentile(double p) const {
  if (errors.empty()) return 0.0;
  std::vector<double> e = errors;
  std::sort(e.begin(), e.end());
  const double rank = std::ceil(std::clamp(p, 0.0, 100.0) / 100.0 * double(e.size()));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return e[std::min(idx, e.size() - 1)];
}

double FkBenchReport::FractionBelow(double threshold) const {
  if (errors.empty()) return 0.0;
  return double(std::count_if(errors.begin(), errors.end(),
                              [&](double e) { return e < threshold; })) /
         double(errors.size());
}

double FkBenchReport::MedianIterations() const {
  if (iterations.empty()) return 0.0;
  std::vector<int> it = iterations;
  std::sort(it.begin(), it.end());
  const std::size_t n = it.size();
  return n % 2 ? it[n / 2] : 0.5 * (it[n / 2 - 1] + it[n / 2]);
}

FkBenchReport RunFkBench(const CdprGeometry& g, const FkConfig& cfg,
                         const FkBenchSpec& spec) {
  if (spec.trials <= 0) throw Error(ErrorCode::kInvalidArgument, "trials must be > 0");
  const std::vector<Pose> poses = SamplePoses(g, spec.poses, spec.trials, spec.seed);
  std::mt19937_64 noise(spec.seed + 1);
  FkBenchReport r;
  r.trials = spec.trials;
  const Pose guess = g.CenterPose();
  const auto t0 = std::chrono::steady_clock::now();
  for (const Pose& p : poses) {
    const CableLengths l = InjectNoise(InverseKinematics(g, p), spec.noise_sigma, noise);
    const FkSolution s = SolveForwardKinematics(g, l, guess, cfg);
    if (s.converged) ++r.converged;
    r.errors.push_back((s.pose.translation - p.translation).norm());
    r.iterations.push_back(s.iterations);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void WriteFkBenchReport(std::ostream& out, const FkBenchSpec& spec,
                        const FkBenchReport& r) {
  const auto flags = out.flags();
  out << std::setprecision(6);
  out << "trials: " << r.trials << "\n";
  out << "noise_sigma_m: " << spec.noise_sigma << "\n";
  out << "seed: " << spec.seed << "\n";
  out << "converged: " << r.converged << "\n";
  out << "translation_error_m:\n";
  for (double p : {50.0, 80.0, 90.0, 95.0, 99.0, 100.0}) {
    out << "  p" << p << ": " << r.ErrorPercentile(p) << "\n";
  }
  out << "fraction_below:\n";
  for (double t : {1e-6, 1e-3, 2e-3, 4e-3}) {
    out << "  " << t * 1e3 << "mm: " << r.FractionBelow(t) << "\n";
  }
  out << "reference_fraction_below_4mm: 0.8\n";
  out << "median_iterations: " << r.MedianIterations() << "\n";
  out << "mean_solve_us: " << 1e6 * r.seconds / r.trials << "\n";
  out.flags(flags);
}

}  // namespace cdpr
