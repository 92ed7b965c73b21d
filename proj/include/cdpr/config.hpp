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

#include <filesystem>
#include <optional>

#include "cdpr/fk_solver.hpp"
#include "cdpr/haptics.hpp"
#include "cdpr/statics.hpp"
#include "cdpr/teleop.hpp"

namespace cdpr {

inline constexpr const char* kConfigEnvVar = "CDPR_CONFIG";

struct FkSettings {
  int max_iterations = 100;
  double residual_tol = 1e-9;
  double step_tol = 1e-10;
  double initial_damping = 1e-3;

  FkConfig ForGeometry(const CdprGeometry& g) const;
};

struct SimConfig {
  double dt = 0.005;                 // s, 200 Hz
  int broadcast_every = 4;           // ticks, 50 Hz
  double pursuit_time_constant = 0.05;  // s, hand -> drag target
  double gimbal_time_constant = 0.1;    // s, position mode
  double hand_compliance = 0.002;    // m/N, operator yield to repulsion
  double noise_sigma = 0.0;          // m, per-cable length noise
  double latency_min = 0.05;         // s, slave-command path
  double latency_max = 0.10;         // s
  // XL330 stall torque 0.228 N m at 1.47 A, 10 mm spool: A per N.
  double current_per_newton = 0.01 * 1.47 / 0.228;

  void Validate() const;
};

/// Everything the service and tools read from the main config file.
struct AppConfig {
  FkSettings fk;
  StaticsConfig statics;
  PlatformInertia inertia;
  SessionConfig session;
  VirtualWall wall;
  bool wall_follows_reference = false;
  HapticConfig haptics;
  SimConfig sim;

  void Validate() const;
};

/// Defaults, with the wall fitted to the default rig's 10 deg region.
AppConfig DefaultConfig();

AppConfig LoadConfig(const std::filesystem::path& path);
void SaveConfig(const AppConfig& cfg, const std::filesystem::path& path);

/// Explicit path, else $CDPR_CONFIG, else nullopt (use defaults).
std::optional<std::filesystem::path> ResolveConfigPath(
    const std::optional<std::filesystem::path>& explicit_path);

}  // namespace cdpr
