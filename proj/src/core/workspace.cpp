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
#include "cdpr/workspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "cdpr/error.hpp"

namespace cdpr {
namespace {

constexpr double kMinPurity = 0.99;
constexpr std::size_t kMinMembers = 100;

struct EllipsoidFit {
  Vec3 center;
  Vec3 radii;
};

struct Enclosed {
  std::size_t total = 0;
  std::size_t members = 0;
};

Enclosed CountEnclosed(std::span<const Vec3> points,
                       const std::vector<bool>& member, const EllipsoidFit& e) {
  Enclosed c;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if ((points[i] - e.center).cwiseQuotient(e.radii).squaredNorm() <= 1.0) {
      ++c.total;
      if (member[i]) ++c.members;
    }
  }
  return c;
}

bool WrenchFeasible(const CdprGeometry& g, const Vec3& qt, const Vec3& inward,
                    const PlatformInertia& inertia, const WrenchProbe& probe) {
  const Pose upright{qt, {}};
  const Wrench grav = GravityWrench(upright, inertia);
  Wrench w{-grav.force, -grav.torque};
  try {
    DistributeTensions(g, upright, w, probe.statics);
    w.force += probe.force * inward;
    DistributeTensions(g, upright, w, probe.statics);
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace

void SamplerSpec::Validate() const {
  if (count <= 0 || !(inner_fraction > 0.0 && inner_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid sampler spec");
  }
}

std::pair<Vec3, Vec3> SampledBox(const CdprGeometry& g,
                                 const SamplerSpec& spec) {
  const Vec3 c = g.FrameCenter();
  const Vec3 half = 0.5 * spec.inner_fraction * (g.FrameUpper() - g.FrameLower());
  return {c - half, c + half};
}

std::vector<Vec3> SamplePoints(const CdprGeometry& g, const SamplerSpec& spec) {
  spec.Validate();
  const auto [lo, hi] = SampledBox(g, spec);
  std::vector<Vec3> pts;
  if (spec.kind == SamplerSpec::Kind::kGrid) {
    int n = 2;
    while (n * n * n < spec.count) ++n;
    pts.reserve(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const Vec3 t(i / double(n - 1), j / double(n - 1), k / double(n - 1));
          pts.push_back(lo + (hi - lo).cwiseProduct(t));
        }
      }
    }
  } else {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    pts.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
      const double x = u(rng);
      const double y = u(rng);
      const double z = u(rng);
      pts.push_back(lo + (hi - lo).cwiseProduct(Vec3(x, y, z)));
    }
  }
  return pts;
}

std::vector<WorkspaceSample> SampleWorkspace(const CdprGeometry& g,
                                             const TensionVector& tensions,
                                             const PlatformInertia& inertia,
                                             std::span<const Vec3> points,
                                             int threads,
                                             const WrenchProbe& probe) {
  std::vector<WorkspaceSample> out(points.size());
  const Vec3 center = g.FrameCenter();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      WorkspaceSample& s = out[i];
      s.qt = points[i];
      const Vec3 out_dir = (s.qt - center).norm() > 0.0
                               ? Vec3((s.qt - center).normalized())
                               : Vec3::Zero();
      s.wrench_feasible = true;
      for (const Vec3& at : {s.qt, Vec3(s.qt + probe.margin * out_dir)}) {
        if (!WrenchFeasible(g, at, -out_dir, inertia, probe)) {
          s.wrench_feasible = false;
          break;
        }
      }

      try {
        const Equilibrium eq = PassiveOrientation(g, s.qt, tensions, inertia);
        s.passive_orientation = eq.orientation;
        s.magnitude = GeodesicAngle(eq.orientation);
        s.feasible = true;
      } catch (const Error&) {
        s.feasible = false;
        s.magnitude = std::numbers::pi;
      }
    }
  };

  std::size_t n_threads = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::thread::hardware_concurrency();
  n_threads = std::clamp<std::size_t>(n_threads, 1, 64);
  if (n_threads == 1 || points.size() < 256) {
    work(0, points.size());
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (points.size() + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(points.size(), begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();  // join
  return out;
}

std::vector<WorkspaceSample> SampleWorkspace(const CdprGeometry& g,
                                             const TensionVector& tensions,
                                             const PlatformInertia& inertia,
                                             const SamplerSpec& spec,
                                             const WrenchProbe& probe) {
  const std::vector<Vec3> pts = SamplePoints(g, spec);
  return SampleWorkspace(g, tensions, inertia, pts, spec.threads, probe);
}

double FractionWithin(std::span<const WorkspaceSample> samples,
                      double threshold) {
  std::size_t feasible = 0;
  std::size_t within = 0;
  for (const auto& s : samples) {
    if (!s.feasible) continue;
    ++feasible;
    if (s.magnitude <= threshold) ++within;
  }
  return feasible == 0 ? 0.0 : double(within) / double(feasible);
}

VirtualWall FitEllipsoid(std::span<const Vec3> points,
                         const std::vector<bool>& member, double threshold) {
  if (member.size() != points.size()) {
    throw Error(ErrorCode::kInvalidArgument, "membership size mismatch");
  }
  Vec3 centroid = Vec3::Zero();
  std::size_t n_members = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (member[i]) {
      centroid += points[i];
      ++n_members;
    }
  }
  if (n_members < kMinMembers) {
    throw Error(ErrorCode::kTooFewMembers,
                "need at least 100 member samples, have " +
                    std::to_string(n_members));
  }
  centroid /= double(n_members);
  // Seed on an actual member: on an even grid the centroid falls between
  // samples and no shrinking ball around it ever encloses one.
  Vec3 seed = centroid;
  double seed_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = (points[i] - centroid).squaredNorm();
    if (member[i] && d2 < seed_d2) {
      seed = points[i];
      seed_d2 = d2;
    }
  }

  Vec3 lo = points[0];
  Vec3 hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 extent = (hi - lo).cwiseMax(1e-9);

  auto inside_box = [&](const EllipsoidFit& e) {
    return (e.radii.array() > 0.0).all() &&
           ((e.center - e.radii) - lo).minCoeff() >= -1e-12 &&
           (hi - (e.center + e.radii)).minCoeff() >= -1e-12;
  };
  auto pure = [](const Enclosed& c) {
    return c.total == 0 || double(c.members) >= kMinPurity * double(c.total);
  };
  // Each enclosed non-member costs `penalty` members; at the final value a
  // shell pays off only while its own purity exceeds kMinPurity. Raised in
  // stages, since a search that starts at the final value stalls against
  // the first few non-members it touches.
  constexpr double kFinalPenalty = kMinPurity / (1.0 - kMinPurity);
  double penalty = 1.0;
  auto score = [&](const Enclosed& c) {
    return double(c.members) - penalty * double(c.total - c.members);
  };
  // Ties on the count go to the larger volume, so the search can cross
  // empty space between samples.
  auto better = [](double s, double v, double best_s, double best_v) {
    return s > best_s || (s == best_s && v > best_v * (1.0 + 1e-12));
  };

  EllipsoidFit best{seed, 0.05 * extent};
  Enclosed best_count = CountEnclosed(points, member, best);
  while (!inside_box(best) || !pure(best_count) || best_count.members == 0) {
    best.radii *= 0.5;
    if (best.radii.maxCoeff() < 1e-9) {
      throw Error(ErrorCode::kTooFewMembers, "no pure region around centroid");
    }
    best_count = CountEnclosed(points, member, best);
  }
  double best_score = score(best_count);

  // (center shift, radius change) per unit step: single-axis grow, shrink,
  // shift and one-sided grow, then grow-all and pairwise trades.
  std::vector<std::pair<Vec3, Vec3>> moves;
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 e = Vec3::Unit(axis);
    moves.emplace_back(Vec3::Zero(), e);
    moves.emplace_back(Vec3::Zero(), -e);
    moves.emplace_back(e, Vec3::Zero());
    moves.emplace_back(-e, Vec3::Zero());
    moves.emplace_back(0.5 * e, 0.5 * e);
    moves.emplace_back(-0.5 * e, 0.5 * e);
  }
  moves.emplace_back(Vec3::Zero(), Vec3::Ones());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) moves.emplace_back(Vec3::Zero(), Vec3::Unit(i) - Vec3::Unit(j));
    }
  }

  auto pattern_search = [&] {
    double step = 0.1 * extent.maxCoeff();
    while (step > 1e-4) {
      bool improved = false;
      for (const auto& [dc, dr] : moves) {
        EllipsoidFit trial{best.center + step * dc, best.radii + step * dr};
        if (!inside_box(trial)) continue;
        const Enclosed count = CountEnclosed(points, member, trial);
        const double s = score(count);
        if (better(s, trial.radii.prod(), best_score, best.radii.prod())) {
          best = trial;
          best_count = count;
          best_score = s;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
  };
  for (double stage : {1.0, 3.0, 9.0, 27.0, kFinalPenalty}) {
    penalty = stage;
    best_score = score(best_count);
    // Restart with a coarse step until a full pass no longer improves.
    for (int pass = 0; pass < 8; ++pass) {
      const double pass_score = best_score;
      const double pass_volume = best.radii.prod();
      pattern_search();
      if (!better(best_score, best.radii.prod(), pass_score, pass_volume)) break;
    }
  }
  // Scale about the center to the largest factor that keeps the purity cap
  // and the box.
  auto scaled = [&](double f) { return EllipsoidFit{best.center, f * best.radii}; };
  auto ok = [&](double f) {
    const EllipsoidFit e = scaled(f);
    return inside_box(e) && pure(CountEnclosed(points, member, e));
  };
  double good = 1.0;
  if (!ok(good)) {
    double bad = 1.0;
    good = 0.5;
    while (!ok(good)) {
      bad = good;
      good *= 0.5;
      if (good < 1e-6) {
        throw Error(ErrorCode::kTooFewMembers, "no pure region around the fit");
      }
    }
    for (int k = 0; k < 40; ++k) {
      const double mid = 0.5 * (good + bad);
      (ok(mid) ? good : bad) = mid;
    }
  } else {
    double bad = 2.0;
    while (ok(bad) && bad < 64.0) {
      good = bad;
      bad *= 2.0;
    }
    for (int k = 0; k < 40; ++k) {
      const double mid = 0.5 * (good + bad);
      (ok(mid) ? good : bad) = mid;
    }
  }
  best = scaled(good);

  VirtualWall wall;
  wall.center = best.center;
  wall.radii = best.radii;
  wall.orientation_threshold = threshold;
  return wall;
}

std::vector<bool> WallMembers(std::span<const WorkspaceSample> samples,
                              double threshold) {
  std::vector<bool> member;
  member.reserve(samples.size());
  for (const auto& s : samples) {
    member.push_back(s.feasible && s.wrench_feasible && s.magnitude <= threshold);
  }
  return member;
}

VirtualWall FitWallEllipsoid(std::span<const WorkspaceSample> samples,
                             double threshold) {
  std::vector<Vec3> pts;
  pts.reserve(samples.size());
  for (const auto& s : samples) pts.push_back(s.qt);
  return FitEllipsoid(pts, WallMembers(samples, threshold), threshold);
}

double EllipsoidVolume(const VirtualWall& w) {
  return 4.0 / 3.0 * std::numbers::pi * w.radii.prod();
}

WorkspaceReport AnalyzeWorkspace(std::span<const WorkspaceSample> samples,
                                 const std::pair<Vec3, Vec3>& box,
                                 double threshold) {
  WorkspaceReport r;
  r.sample_count = samples.size();
  r.feasible_count = static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(),
                    [](const WorkspaceSample& s) { return s.feasible; }));
  for (double deg : {2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 45.0, 90.0, 180.0}) {
    r.fraction_within.emplace_back(deg, FractionWithin(samples, deg * kDegToRad));
  }
  r.fitted = FitWallEllipsoid(samples, threshold);
  r.inside_volume = EllipsoidVolume(r.fitted);
  const double box_volume = (box.second - box.first).prod();
  r.total_volume = r.sample_count == 0
                       ? 0.0
                       : box_volume * double(r.feasible_count) /
                             double(r.sample_count);
  return r;
}

void WriteReport(std::ostream& out, const WorkspaceReport& r) {
  const auto flags = out.flags();
  out << std::setprecision(6);
  out << "samples: " << r.sample_count << "\n";
  out << "feasible: " << r.feasible_count << "\n";
  out << "fraction_within:\n";
  for (const auto& [deg, frac] : r.fraction_within) {
    out << "  " << deg << "deg: " << frac << "\n";
  }
  out << "reference_fraction_within_15deg: 0.985\n";
  out << "wall:\n";
  out << "  center: [" << r.fitted.center.x() << ", " << r.fitted.center.y()
      << ", " << r.fitted.center.z() << "]\n";
  out << "  radii: [" << r.fitted.radii.x() << ", " << r.fitted.radii.y()
      << ", " << r.fitted.radii.z() << "]\n";
  out << "  threshold_deg: " << r.fitted.orientation_threshold / kDegToRad
      << "\n";
  out << "inside_volume_m3: " << r.inside_volume << "\n";
  out << "total_volume_m3: " << r.total_volume << "\n";
  out.flags(flags);
}

void WriteSamples(std::ostream& out, std::span<const WorkspaceSample> samples) {
  const auto flags = out.flags();
  out << std::setprecision(9);
  out << "# x y z rx ry rz magnitude_deg feasible\n";
  for (const auto& s : samples) {
    out << s.qt.x() << ' ' << s.qt.y() << ' ' << s.qt.z() << ' '
        << s.passive_orientation.rx << ' ' << s.passive_orientation.ry << ' '
        << s.passive_orientation.rz << ' ' << s.magnitude / kDegToRad << ' '
        << (s.feasible ? 1 : 0) << "\n";
  }
  out.flags(flags);
}

}  // namespace cdpr
