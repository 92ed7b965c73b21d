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
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cdpr/config.hpp"
#include "cdpr/fk_solver.hpp"
#include "cdpr/serialization.hpp"

namespace cdpr {

/// One operator message. Absent fields leave the previous value in place.
/// `pedal` is a level; the clutch toggles on its edges.
struct OperatorInput {
  double timestamp = 0.0;  // client clock, s; must not decrease per client
  std::optional<Vec3> drag_target;
  std::optional<GimbalState> gimbal;
  std::optional<bool> pedal;
  std::optional<ActuatorMode> mode;
  std::optional<double> scale;
  bool override_wall = false;  // engage even if outside the wall
};

Json InputToJson(const OperatorInput& in);
OperatorInput InputFromJson(const Json& j);

/// Adds i.i.d. N(0, sigma^2) to each cable. sigma = 0 returns `l` unchanged
/// and draws nothing.
CableLengths InjectNoise(const CableLengths& l, double sigma,
                         std::mt19937_64& rng);
CableLengths InjectNoise(const CableLengths& l, double sigma,
                         std::uint64_t seed);

/// Delays slave commands by U(min, max) of simulated time. Release times
/// never decrease, so order is preserved.
class LatencyLine {
 public:
  LatencyLine(double min_delay, double max_delay, std::uint64_t seed);

  void Push(double now, const SlaveCommand& cmd);
  /// Latest command released at or before `now`, if any was released.
  std::optional<SlaveCommand> Pop(double now);
  std::size_t pending() const { return queue_.size(); }

 private:
  double min_;
  double max_;
  std::mt19937_64 rng_;
  double last_release_ = 0.0;
  std::deque<std::pair<double, SlaveCommand>> queue_;
};

struct SimState {
  std::int64_t tick = 0;
  double time = 0.0;                 // tick * dt
  Pose pose;                         // plant (true) master pose
  Vec3 hand_target = Vec3::Zero();   // current drag target
  CableAccounting cable;             // l0 = lengths at the center pose
  FkSolution estimate;               // FK from the sensed lengths
  TensionVector tensions = TensionVector::Zero();
  CableVector currents = CableVector::Zero();  // A
  bool wall_breached = false;
  double wall_value = 0.0;
  double pulse = 0.0;                // repulsion modulation factor
  Vec3 repulsion = Vec3::Zero();     // unmodulated repulsion force, N
  bool pedal = false;
  SessionState session;
  GimbalState gimbal;                // measured gimbal joints
  std::optional<MasterCommand> master_command;
  SlaveCommand slave_command;        // generated (held while disengaged)
  SlaveCommand slave_delivered;      // after latency
  int clamp_events = 0;
  std::string fault;                 // empty when the tick was clean
};

/// Quasi-static master model stepped at a fixed dt. Deterministic given the
/// geometry, config, seed and input stream.
class Simulator {
 public:
  Simulator(CdprGeometry g, AppConfig cfg, std::uint64_t seed);

  const SimState& state() const { return state_; }
  const CdprGeometry& geometry() const { return g_; }
  const AppConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  /// Applies `inputs` in order, then advances one tick. Module errors land
  /// in state().fault; the loop never throws on them.
  const SimState& Step(const std::vector<OperatorInput>& inputs);

 private:
  void Apply(const OperatorInput& in, std::string& fault);
  VirtualWall ActiveWall() const;

  CdprGeometry g_;
  AppConfig cfg_;
  std::uint64_t seed_;
  FkConfig fk_cfg_;
  std::mt19937_64 noise_rng_;
  LatencyLine latency_;
  InitialGuessPolicy guess_;
  PulseScheduler pulses_;
  TeleopSession session_;
  GimbalState gimbal_target_;
  SimState state_;
};

Json StateToJson(const SimState& s);

/// Tick line of a trajectory file: the inputs applied at this tick plus the
/// resulting state.
Json TickToJson(const std::vector<OperatorInput>& inputs, const SimState& s);

inline constexpr const char* kTrajectoryFormat = "cdpr-trajectory";
inline constexpr int kTrajectoryVersion = 1;

Json TrajectoryHeader(const CdprGeometry& g, const AppConfig& cfg,
                      std::uint64_t seed, int arm);

/// Simulator configured from a trajectory header. The service builds its
/// simulators this way too, so a recorded run and its replay start from the
/// same parsed numbers.
std::unique_ptr<Simulator> SimulatorFromHeader(
    const Json& header, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Writes one JSON line per record; the header comes first.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& path);
  explicit TrajectoryWriter(std::ostream& out);
  ~TrajectoryWriter();

  void WriteLine(const Json& record);
  void Flush();

 private:
  std::unique_ptr<std::ostream> owned_;
  std::ostream* out_;
};

struct TrajectoryFile {
  std::string header_line;              // verbatim, without '\n'
  Json header;
  std::vector<std::string> tick_lines;  // verbatim, without '\n'
  std::vector<std::vector<OperatorInput>> inputs;
};

/// Throws kParseError naming the 1-based line number on malformed input.
TrajectoryFile ReadTrajectory(std::istream& in);
TrajectoryFile ReadTrajectory(const std::filesystem::path& path);

struct ReplayResult {
  std::size_t ticks = 0;
  bool comparable = true;   // false when the seed was overridden
  bool identical = false;   // every regenerated line equals the recorded one
  std::size_t first_mismatch_line = 0;  // 1-based file line, 0 if none
  std::string output;       // regenerated file, header included
};

/// Re-runs the recorded input stream. `seed_override` replaces the header
/// seed and marks the result as not comparable.
ReplayResult Replay(const TrajectoryFile& file,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace cdpr
