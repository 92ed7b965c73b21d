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
#include <span>
#include <utility>
#include <vector>

#include "cdpr/haptics.hpp"
#include "cdpr/statics.hpp"

namespace cdpr {

struct WorkspaceSample {
  Vec3 qt = Vec3::Zero();
  EulerXYZ passive_orientation;
  double magnitude = 0.0;  // geodesic angle of passive_orientation, rad
  bool feasible = false;   // equilibrium found
  // Gravity, and gravity plus a probe force toward the frame center, are
  // both realizable with tensions >= f_min at zero orientation, here and
  // `margin` farther out from the center.
  bool wrench_feasible = false;
};

struct WrenchProbe {
  StaticsConfig statics;
  double force = 5.0;    // N, matches the default repulsion gain
  double margin = 0.03;  // m, room to render repulsion past the wall
};

struct SamplerSpec {
  enum class Kind { kGrid, kMonteCarlo };
  Kind kind = Kind::kGrid;
  int count = 9000;             // grid rounds up to the next cube
  double inner_fraction = 0.8;  // of the frame box, per axis
  std::uint64_t seed = 1;
  int threads = 0;              // 0 = hardware concurrency

  void Validate() const;
};

/// Box actually sampled: the frame box shrunk about its center.
std::pair<Vec3, Vec3> SampledBox(const CdprGeometry& g, const SamplerSpec& spec);

std::vector<Vec3> SamplePoints(const CdprGeometry& g, const SamplerSpec& spec);

/// Passive orientation at each point for fixed tensions. Failed solves are
/// recorded as infeasible; results are in point order.
std::vector<WorkspaceSample> SampleWorkspace(const CdprGeometry& g,
                                             const TensionVector& tensions,
                                             const PlatformInertia& inertia,
                                             std::span<const Vec3> points,
                                             int threads = 0,
                                             const WrenchProbe& probe = {});

std::vector<WorkspaceSample> SampleWorkspace(const CdprGeometry& g,
                                             const TensionVector& tensions,
                                             const PlatformInertia& inertia,
                                             const SamplerSpec& spec,
                                             const WrenchProbe& probe = {});

/// Fraction of feasible samples whose magnitude is <= threshold (rad).
double FractionWithin(std::span<const WorkspaceSample> samples,
                      double threshold);

/// Members for the wall fit: wrench-feasible with magnitude <= threshold.
std::vector<bool> WallMembers(std::span<const WorkspaceSample> samples,
                              double threshold);

/// Largest axis-aligned ellipsoid inside the bounding box of `points` whose
/// enclosed points are >= 99% members, found by deterministic pattern
/// search over center and radii. Throws kTooFewMembers below 100 members.
VirtualWall FitEllipsoid(std::span<const Vec3> points,
                         const std::vector<bool>& member, double threshold);

VirtualWall FitWallEllipsoid(std::span<const WorkspaceSample> samples,
                             double threshold);

/// (4/3) pi rx ry rz.
double EllipsoidVolume(const VirtualWall& w);

struct WorkspaceReport {
  std::size_t sample_count = 0;
  std::size_t feasible_count = 0;
  std::vector<std::pair<double, double>> fraction_within;  // (deg, fraction)
  VirtualWall fitted;
  double inside_volume = 0.0;  // m^3
  double total_volume = 0.0;   // m^3
};

WorkspaceReport AnalyzeWorkspace(std::span<const WorkspaceSample> samples,
                                 const std::pair<Vec3, Vec3>& box,
                                 double threshold);

void WriteReport(std::ostream& out, const WorkspaceReport& r);

/// One line per sample: x y z rx ry rz magnitude_deg feasible.
void WriteSamples(std::ostream& out, std::span<const WorkspaceSample> samples);

}  // namespace cdpr
