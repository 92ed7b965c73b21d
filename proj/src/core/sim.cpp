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
#include "cdpr/sim.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cdpr/error.hpp"

namespace cdpr {
namespace {

// Keeps the plant off the frame anchors.
constexpr double kFrameMargin = 0.01;  // m

void AddFault(std::string& fault, const std::string& what) {
  if (!fault.empty()) fault += "; ";
  fault += what;
}

Json PoseToJson(const Pose& p) {
  return {{"qt", ToJsonArray(p.translation)},
          {"qo", ToJsonArray(p.orientation.AsVector())}};
}

Json GimbalToJson(const GimbalState& g) {
  return {{"roll", g.roll},
          {"pitch", g.pitch},
          {"yaw", g.yaw},
          {"trigger", g.trigger},
          {"knob", g.knob}};
}

GimbalState GimbalFromJson(const Json& j) {
  if (!j.is_object()) ThrowParse("gimbal: expected an object");
  GimbalState g;
  for (auto [key, field] : {std::pair{"roll", &g.roll}, {"pitch", &g.pitch},
                            {"yaw", &g.yaw}, {"trigger", &g.trigger},
                            {"knob", &g.knob}}) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      ThrowParse(std::string("gimbal.") + key + ": expected a number");
    }
    *field = j.at(key).get<double>();
    if (!std::isfinite(*field)) ThrowParse(std::string("gimbal.") + key + ": not finite");
  }
  return g;
}

}  // namespace

Json InputToJson(const OperatorInput& in) {
  Json j;
  j["timestamp"] = in.timestamp;
  if (in.drag_target) j["drag_target"] = ToJsonArray(*in.drag_target);
  if (in.gimbal) j["gimbal"] = GimbalToJson(*in.gimbal);
  if (in.pedal) j["pedal"] = *in.pedal;
  if (in.mode) j["mode"] = std::string(ToString(*in.mode));
  if (in.scale) j["scale"] = *in.scale;
  if (in.override_wall) j["override_wall"] = true;
  return j;
}

OperatorInput InputFromJson(const Json& j) {
  if (!j.is_object()) ThrowParse("operator input: expected an object");
  OperatorInput in;
  if (!j.contains("timestamp") || !j["timestamp"].is_number()) {
    ThrowParse("timestamp: required number");
  }
  in.timestamp = j["timestamp"].get<double>();
  if (!std::isfinite(in.timestamp)) ThrowParse("timestamp: not finite");
  if (j.contains("drag_target")) {
    in.drag_target = FromJsonArray<3>(j["drag_target"], "drag_target");
    if (!in.drag_target->allFinite()) ThrowParse("drag_target: not finite");
  }
  if (j.contains("gimbal")) in.gimbal = GimbalFromJson(j["gimbal"]);
  if (j.contains("pedal")) {
    if (!j["pedal"].is_boolean()) ThrowParse("pedal: expected true/false");
    in.pedal = j["pedal"].get<bool>();
  }
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) ThrowParse("mode: expected a string");
    try {
      in.mode = ParseActuatorMode(j["mode"].get<std::string>());
    } catch (const Error& e) {
      ThrowParse(e.what());
    }
  }
  if (j.contains("scale")) {
    if (!j["scale"].is_number() || !(j["scale"].get<double>() > 0.0)) {
      ThrowParse("scale: expected a positive number");
    }
    in.scale = j["scale"].get<double>();
  }
  if (j.contains("override_wall")) {
    if (!j["override_wall"].is_boolean()) ThrowParse("override_wall: expected true/false");
    in.override_wall = j["override_wall"].get<bool>();
  }
  return in;
}

CableLengths InjectNoise(const CableLengths& l, double sigma,
                         std::mt19937_64& rng) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
  }
  if (sigma == 0.0) return l;
  std::normal_distribution<double> n(0.0, sigma);
  CableLengths out = l;
  for (int i = 0; i < kNumCables; ++i) out[i] += n(rng);
  return out;
}

CableLengths InjectNoise(const CableLengths& l, double sigma,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return InjectNoise(l, sigma, rng);
}

LatencyLine::LatencyLine(double min_delay, double max_delay, std::uint64_t seed)
    : min_(min_delay), max_(max_delay), rng_(seed) {
  if (!(min_delay >= 0.0) || !(max_delay >= min_delay)) {
    throw Error(ErrorCode::kInvalidArgument, "latency range must be 0 <= min <= max");
  }
}

void LatencyLine::Push(double now, const SlaveCommand& cmd) {
  double delay = min_;
  if (max_ > min_) delay = std::uniform_real_distribution<double>(min_, max_)(rng_);
  last_release_ = std::max(last_release_, now + delay);
  queue_.emplace_back(last_release_, cmd);
}

std::optional<SlaveCommand> LatencyLine::Pop(double now) {
  std::optional<SlaveCommand> out;
  while (!queue_.empty() && queue_.front().first <= now) {
    out = queue_.front().second;
    queue_.pop_front();
  }
  return out;
}

Simulator::Simulator(CdprGeometry g, AppConfig cfg, std::uint64_t seed)
    : g_(std::move(g)),
      cfg_(std::move(cfg)),
      seed_(seed),
      fk_cfg_(cfg_.fk.ForGeometry(g_)),
      noise_rng_(seed),
      latency_(cfg_.sim.latency_min, cfg_.sim.latency_max,
               seed ^ 0x9e3779b97f4a7c15ULL),
      guess_(g_.CenterPose()),
      pulses_(cfg_.haptics),
      session_(cfg_.session, Vec3::Zero()) {
  g_.Validate();
  cfg_.Validate();
  const Pose center = g_.CenterPose();
  state_.pose = center;
  state_.hand_target = center.translation;
  state_.cable.l0 = InverseKinematics(g_, center);
  state_.estimate.pose = center;
  state_.estimate.converged = true;
  state_.tensions = GravityCompensation(g_, center, cfg_.inertia, cfg_.statics).tensions;
  state_.currents = state_.tensions * cfg_.sim.current_per_newton;
  state_.wall_value = WallValue(cfg_.wall, center.translation);
  state_.session = session_.state();
  state_.slave_command = session_.last_slave();
  state_.slave_delivered = session_.last_slave();
}

VirtualWall Simulator::ActiveWall() const {
  VirtualWall w = cfg_.wall;
  if (cfg_.wall_follows_reference && session_.state().clutch_engaged) {
    w.center = session_.state().master_ref;
  }
  return w;
}

void Simulator::Apply(const OperatorInput& in, std::string& fault) {
  if (in.drag_target) state_.hand_target = *in.drag_target;
  if (in.gimbal) gimbal_target_ = *in.gimbal;
  if (in.mode) session_.SetMode(*in.mode);
  if (in.scale) {
    try {
      session_.SetScale(*in.scale, state_.estimate.pose);
    } catch (const Error& e) {
      AddFault(fault, e.what());
    }
  }
  if (in.pedal && *in.pedal != state_.pedal) {
    state_.pedal = *in.pedal;
    if (state_.pedal) {
      const VirtualWall wall = cfg_.wall;
      try {
        session_.Engage(state_.estimate.pose, &wall, in.override_wall);
      } catch (const Error& e) {
        AddFault(fault, e.what());
      }
    } else {
      session_.Disengage();
    }
  }
}

const SimState& Simulator::Step(const std::vector<OperatorInput>& inputs) {
  std::string fault;
  for (const auto& in : inputs) Apply(in, fault);

  SimState& s = state_;
  const double dt = cfg_.sim.dt;
  ++s.tick;
  s.time = static_cast<double>(s.tick) * dt;

  // Hand: first-order pursuit of the drag target, yielding to the force the
  // master applied on the previous tick.
  const double a = -std::expm1(-dt / cfg_.sim.pursuit_time_constant);
  const Vec3 goal = s.hand_target + cfg_.sim.hand_compliance * s.pulse * s.repulsion;
  Vec3 qt = s.pose.translation + a * (goal - s.pose.translation);
  qt = qt.cwiseMax(g_.FrameLower() + Vec3::Constant(kFrameMargin))
           .cwiseMin(g_.FrameUpper() - Vec3::Constant(kFrameMargin));
  s.pose.translation = qt;

  // Backdrivable joints follow the hand; position mode holds them.
  if (session_.state().mode == ActuatorMode::kCurrent) {
    const double b = -std::expm1(-dt / cfg_.sim.gimbal_time_constant);
    s.gimbal = GimbalState::FromVector(
        s.gimbal.AsVector() + b * (gimbal_target_.AsVector() - s.gimbal.AsVector()));
  }
  session_.SetGimbal(s.gimbal);
  s.gimbal = session_.state().gimbal;
  s.clamp_events = session_.clamp_events();

  try {
    s.pose.orientation =
        PassiveOrientation(g_, qt, s.tensions, cfg_.inertia, s.pose.orientation)
            .orientation;
  } catch (const Error& e) {
    AddFault(fault, std::string("passive orientation: ") + e.what());
  }

  try {
    const CableLengths sensed =
        InjectNoise(InverseKinematics(g_, s.pose), cfg_.sim.noise_sigma, noise_rng_);
    s.cable.delta = sensed - s.cable.l0;
    s.estimate = SolveForwardKinematics(g_, ActualLengths(s.cable), guess_.Next(), fk_cfg_);
    guess_.Record(s.estimate);
    if (!s.estimate.converged) AddFault(fault, "fk: not converged");
  } catch (const Error& e) {
    AddFault(fault, std::string("fk: ") + e.what());
  }

  const Vec3 est = s.estimate.pose.translation;
  const VirtualWall wall = ActiveWall();
  s.wall_value = WallValue(wall, est);
  s.wall_breached = s.wall_value > 1.0;
  s.pulse = pulses_.Update(s.time, s.wall_breached);
  s.repulsion.setZero();
  if (s.wall_breached) {
    try {
      s.repulsion = RepulsionDemand(wall, est, cfg_.haptics).head<3>();
    } catch (const Error& e) {
      AddFault(fault, std::string("haptics: ") + e.what());
    }
  }

  Vector6 demand = Vector6::Zero();
  demand.head<3>() = s.pulse * s.repulsion;
  const Pose upright{est, {}};
  try {
    s.tensions = HapticTensions(g_, upright, demand, cfg_.inertia, cfg_.statics).tensions;
  } catch (const Error& e) {
    AddFault(fault, std::string("tensions: ") + e.what());
    try {
      s.tensions = GravityCompensation(g_, upright, cfg_.inertia, cfg_.statics).tensions;
    } catch (const Error&) {
      // Keep the previous tensions.
    }
  }
  s.currents = s.tensions * cfg_.sim.current_per_newton;

  if (session_.state().clutch_engaged) {
    const auto [m, sl] = session_.Update(s.estimate.pose);
    s.master_command = m;
    s.slave_command = sl;
    latency_.Push(s.time, sl);
  } else {
    s.master_command.reset();
    s.slave_command = session_.last_slave();
  }
  if (auto delivered = latency_.Pop(s.time)) s.slave_delivered = *delivered;

  s.session = session_.state();
  s.fault = std::move(fault);
  return s;
}

Json StateToJson(const SimState& s) {
  Json j;
  j["tick"] = s.tick;
  j["t"] = s.time;
  j["pose"] = PoseToJson(s.pose);
  j["estimate"] = {{"qt", ToJsonArray(s.estimate.pose.translation)},
                   {"qo", ToJsonArray(s.estimate.pose.orientation.AsVector())},
                   {"residual", s.estimate.residual_norm},
                   {"iterations", s.estimate.iterations},
                   {"converged", s.estimate.converged}};
  j["hand_target"] = ToJsonArray(s.hand_target);
  j["gimbal"] = GimbalToJson(s.gimbal);
  j["cable"] = {{"l0", ToJsonArray(s.cable.l0)}, {"delta", ToJsonArray(s.cable.delta)}};
  j["tensions"] = ToJsonArray(s.tensions);
  j["currents"] = ToJsonArray(s.currents);
  j["wall"] = {{"breached", s.wall_breached},
               {"value", s.wall_value},
               {"pulse", s.pulse},
               {"repulsion", ToJsonArray(s.repulsion)}};
  j["session"] = {{"clutch", s.session.clutch_engaged},
                  {"pedal", s.pedal},
                  {"mode", std::string(ToString(s.session.mode))},
                  {"scale", s.session.scale},
                  {"master_ref", ToJsonArray(s.session.master_ref)},
                  {"slave_ref", ToJsonArray(s.session.slave_ref)}};
  j["xm"] = s.master_command ? ToJsonArray(s.master_command->x) : Json(nullptr);
  j["xs"] = ToJsonArray(s.slave_command.x);
  j["xs_delivered"] = ToJsonArray(s.slave_delivered.x);
  j["clamp_events"] = s.clamp_events;
  j["fault"] = s.fault;
  return j;
}

Json TickToJson(const std::vector<OperatorInput>& inputs, const SimState& s) {
  Json j;
  j["tick"] = s.tick;
  Json in = Json::array();
  for (const auto& i : inputs) in.push_back(InputToJson(i));
  j["inputs"] = in;
  const Json state = StateToJson(s);
  for (const auto& [key, value] : state.items()) {
    if (key != "tick") j[key] = value;
  }
  return j;
}

Json TrajectoryHeader(const CdprGeometry& g, const AppConfig& cfg,
                      std::uint64_t seed, int arm) {
  Json j;
  j["format"] = kTrajectoryFormat;
  j["version"] = kTrajectoryVersion;
  j["arm"] = arm;
  j["seed"] = seed;
  j["geometry"] = GeometryToJson(g);
  j["config"] = ConfigToJson(cfg);
  return j;
}

std::unique_ptr<Simulator> SimulatorFromHeader(
    const Json& header, std::optional<std::uint64_t> seed_override) {
  if (!header.is_object() || header.value("format", "") != kTrajectoryFormat) {
    ThrowParse("not a cdpr-trajectory header");
  }
  if (header.value("version", 0) != kTrajectoryVersion) {
    ThrowParse("unsupported trajectory version");
  }
  if (!header.contains("seed") || !header["seed"].is_number_unsigned()) {
    ThrowParse("seed: expected an unsigned integer");
  }
  if (!header.contains("geometry") || !header.contains("config")) {
    ThrowParse("header needs geometry and config");
  }
  const std::uint64_t seed =
      seed_override.value_or(header["seed"].get<std::uint64_t>());
  return std::make_unique<Simulator>(GeometryFromJson(header["geometry"]),
                                     ConfigFromJson(header["config"]), seed);
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path)
    : owned_(std::make_unique<std::ofstream>(path, std::ios::binary)),
      out_(owned_.get()) {
  if (!*out_) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out) : out_(&out) {}

TrajectoryWriter::~TrajectoryWriter() { Flush(); }

void TrajectoryWriter::WriteLine(const Json& record) {
  *out_ << record.dump() << '\n';
}

void TrajectoryWriter::Flush() { out_->flush(); }

TrajectoryFile ReadTrajectory(std::istream& in) {
  TrajectoryFile f;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (in.eof()) fail("missing line terminator (truncated file?)");
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      fail(e.what());
    }
    try {
      if (line_no == 1) {
        SimulatorFromHeader(j);  // validates geometry and config
        f.header_line = line;
        f.header = std::move(j);
        continue;
      }
      if (!j.is_object() || !j.contains("tick") || !j["tick"].is_number_integer()) {
        ThrowParse("tick: required integer");
      }
      if (j["tick"].get<std::int64_t>() != static_cast<std::int64_t>(line_no - 1)) {
        ThrowParse("tick out of sequence");
      }
      if (!j.contains("inputs") || !j["inputs"].is_array()) {
        ThrowParse("inputs: required array");
      }
      std::vector<OperatorInput> inputs;
      for (const auto& i : j["inputs"]) inputs.push_back(InputFromJson(i));
      f.inputs.push_back(std::move(inputs));
      f.tick_lines.push_back(line);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (line_no == 0) throw Error(ErrorCode::kParseError, "line 1: empty file");
  return f;
}

TrajectoryFile ReadTrajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ReadTrajectory(in);
}

ReplayResult Replay(const TrajectoryFile& file,
                    std::optional<std::uint64_t> seed_override) {
  ReplayResult r;
  Json header = file.header;
  if (seed_override && *seed_override != header["seed"].get<std::uint64_t>()) {
    r.comparable = false;
    header["seed"] = *seed_override;
  }
  auto sim = SimulatorFromHeader(header);

  std::ostringstream out;
  TrajectoryWriter writer(out);
  writer.WriteLine(header);
  r.identical = header.dump() == file.header_line;
  if (!r.identical) r.first_mismatch_line = 1;
  for (std::size_t k = 0; k < file.inputs.size(); ++k) {
    const std::string line = TickToJson(file.inputs[k], sim->Step(file.inputs[k])).dump();
    if (r.identical && line != file.tick_lines[k]) {
      r.identical = false;
      r.first_mismatch_line = k + 2;
    }
    out << line << '\n';
  }
  writer.Flush();
  r.ticks = file.inputs.size();
  r.output = out.str();
  return r;
}

}  // namespace cdpr
