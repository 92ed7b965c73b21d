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
#include "cdpr/cdpr.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "cdpr/config.hpp"
#include "cdpr/error.hpp"
#include "cdpr/fk_bench.hpp"
#include "cdpr/service.hpp"
#include "cdpr/sim.hpp"
#include "cdpr/workspace.hpp"

struct cdpr_geometry {
  cdpr::CdprGeometry g;
};
struct cdpr_config {
  cdpr::AppConfig cfg;
};
struct cdpr_session {
  cdpr::TeleopSession session;
};
struct cdpr_sim {
  std::unique_ptr<cdpr::Simulator> sim;
};
struct cdpr_service {
  std::unique_ptr<cdpr::Service> service;
};

namespace {

using cdpr::Error;
using cdpr::ErrorCode;

thread_local std::string g_last_error;

cdpr_status Fail(cdpr_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
cdpr_status Guard(Fn&& fn) {
  try {
    fn();
    return CDPR_OK;
  } catch (const Error& e) {
    return Fail(static_cast<cdpr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(CDPR_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return Fail(CDPR_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(CDPR_ERR_INTERNAL, "unknown exception");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> In(const double* v) {
  return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v);
}

template <typename Derived>
void Out(const Eigen::MatrixBase<Derived>& m, double* dst) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) *dst++ = m(r, c);
  }
}

cdpr::Pose PoseIn(const double* p) {
  return cdpr::Pose::FromVector(In<6>(p));
}

cdpr::VirtualWall WallIn(const cdpr_wall* w) {
  cdpr::VirtualWall wall;
  wall.center = In<3>(w->center);
  wall.radii = In<3>(w->radii);
  wall.orientation_threshold = w->orientation_threshold;
  wall.Validate();
  return wall;
}

void WallOut(const cdpr::VirtualWall& wall, cdpr_wall* w) {
  Out(wall.center, w->center);
  Out(wall.radii, w->radii);
  w->orientation_threshold = wall.orientation_threshold;
}

cdpr::PlatformInertia Inertia(double mass) {
  Require(mass > 0.0, "mass must be positive");
  cdpr::PlatformInertia in;
  in.mass = mass;
  return in;
}

}  // namespace

extern "C" {

const char* cdpr_version(void) { return "0.1.0"; }

const char* cdpr_status_string(cdpr_status status) {
  switch (status) {
    case CDPR_OK:
      return "ok";
    case CDPR_ERR_OUT_OF_MEMORY:
      return "out of memory";
    case CDPR_ERR_INTERNAL:
      return "internal error";
    default:
      if (status >= CDPR_ERR_INVALID_ARGUMENT && status <= CDPR_ERR_PORT_IN_USE) {
        return cdpr::ToString(static_cast<ErrorCode>(status));
      }
      return "unknown status";
  }
}

const char* cdpr_last_error(void) { return g_last_error.c_str(); }

void cdpr_free_string(char* s) { std::free(s); }

// ---- geometry ---------------------------------------------------------

cdpr_status cdpr_geometry_default(cdpr_geometry** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    *out = new cdpr_geometry{cdpr::DefaultGeometry()};
  });
}

cdpr_status cdpr_geometry_load(const char* path, cdpr_geometry** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new cdpr_geometry{cdpr::LoadGeometry(path)};
  });
}

cdpr_status cdpr_geometry_from_anchors(const double frame[24], const double body[24],
                                       cdpr_geometry** out) {
  return Guard([&] {
    Require(frame != nullptr && body != nullptr && out != nullptr, "null argument");
    cdpr::CdprGeometry g;
    for (int i = 0; i < cdpr::kNumCables; ++i) {
      g.frame_anchors[i] = In<3>(frame + 3 * i);
      g.body_anchors[i] = In<3>(body + 3 * i);
    }
    g.Validate();
    *out = new cdpr_geometry{g};
  });
}

cdpr_status cdpr_geometry_anchors(const cdpr_geometry* g, double frame[24],
                                  double body[24]) {
  return Guard([&] {
    Require(g != nullptr && frame != nullptr && body != nullptr, "null argument");
    for (int i = 0; i < cdpr::kNumCables; ++i) {
      Out(g->g.frame_anchors[i], frame + 3 * i);
      Out(g->g.body_anchors[i], body + 3 * i);
    }
  });
}

cdpr_status cdpr_geometry_save(const cdpr_geometry* g, const char* path) {
  return Guard([&] {
    Require(g != nullptr && path != nullptr, "null argument");
    cdpr::SaveGeometry(g->g, path);
  });
}

cdpr_status cdpr_geometry_center(const cdpr_geometry* g, double center[3]) {
  return Guard([&] {
    Require(g != nullptr && center != nullptr, "null argument");
    Out(g->g.FrameCenter(), center);
  });
}

void cdpr_geometry_free(cdpr_geometry* g) { delete g; }

// ---- kinematics -------------------------------------------------------

cdpr_status cdpr_rotation_xyz(const double orientation[3], double r[9]) {
  return Guard([&] {
    Require(orientation != nullptr && r != nullptr, "null argument");
    Out(cdpr::RotationXYZ(cdpr::EulerXYZ::FromVector(In<3>(orientation))), r);
  });
}

cdpr_status cdpr_geodesic_angle(const double orientation[3], double* out) {
  return Guard([&] {
    Require(orientation != nullptr && out != nullptr, "null argument");
    *out = cdpr::GeodesicAngle(cdpr::EulerXYZ::FromVector(In<3>(orientation)));
  });
}

cdpr_status cdpr_cable_vector(const cdpr_geometry* g, const double pose[6], int cable,
                              double out[3]) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && out != nullptr, "null argument");
    Out(cdpr::CableSegment(g->g, PoseIn(pose), cable), out);
  });
}

cdpr_status cdpr_inverse_kinematics(const cdpr_geometry* g, const double pose[6],
                                    double lengths[8]) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && lengths != nullptr, "null argument");
    Out(cdpr::InverseKinematics(g->g, PoseIn(pose)), lengths);
  });
}

cdpr_status cdpr_length_jacobian(const cdpr_geometry* g, const double pose[6],
                                 double j[48]) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && j != nullptr, "null argument");
    Out(cdpr::LengthJacobian(g->g, PoseIn(pose)), j);
  });
}

cdpr_status cdpr_twist_jacobian(const cdpr_geometry* g, const double pose[6],
                                double j[48]) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && j != nullptr, "null argument");
    Out(cdpr::TwistJacobian(g->g, PoseIn(pose)), j);
  });
}

// ---- forward kinematics -----------------------------------------------

void cdpr_fk_options_default(cdpr_fk_options* out) {
  if (out == nullptr) return;
  const cdpr::FkSettings d;
  out->max_iterations = d.max_iterations;
  out->residual_tol = d.residual_tol;
  out->step_tol = d.step_tol;
  out->initial_damping = d.initial_damping;
}

cdpr_status cdpr_fk_solve(const cdpr_geometry* g, const double lengths[8],
                          const double guess[6], const cdpr_fk_options* opts,
                          cdpr_fk_result* out) {
  return Guard([&] {
    Require(g != nullptr && lengths != nullptr && guess != nullptr && out != nullptr,
            "null argument");
    cdpr::FkSettings s;
    if (opts != nullptr) {
      s.max_iterations = opts->max_iterations;
      s.residual_tol = opts->residual_tol;
      s.step_tol = opts->step_tol;
      s.initial_damping = opts->initial_damping;
    }
    const cdpr::FkSolution sol = cdpr::SolveForwardKinematics(
        g->g, In<8>(lengths), PoseIn(guess), s.ForGeometry(g->g));
    Out(sol.pose.AsVector(), out->pose);
    out->residual = sol.residual_norm;
    out->iterations = sol.iterations;
    out->converged = sol.converged ? 1 : 0;
  });
}

// ---- statics ----------------------------------------------------------

cdpr_status cdpr_wrench_from_tensions(const cdpr_geometry* g, const double pose[6],
                                      const double tensions[8], double wrench[6]) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && tensions != nullptr && wrench != nullptr,
            "null argument");
    Out(cdpr::WrenchFromTensions(g->g, PoseIn(pose), In<8>(tensions)).AsVector(), wrench);
  });
}

cdpr_status cdpr_distribute_tensions(const cdpr_geometry* g, const double pose[6],
                                     const double wrench[6], double f_min,
                                     double tensions[8], double* residual) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && wrench != nullptr && tensions != nullptr,
            "null argument");
    Require(f_min >= 0.0, "f_min must be >= 0");
    cdpr::StaticsConfig cfg;
    cfg.f_min = f_min;
    const cdpr::TensionSolution sol = cdpr::DistributeTensions(
        g->g, PoseIn(pose), cdpr::Wrench::FromVector(In<6>(wrench)), cfg);
    Out(sol.tensions, tensions);
    if (residual != nullptr) *residual = sol.residual;
  });
}

cdpr_status cdpr_gravity_compensation(const cdpr_geometry* g, const double pose[6],
                                      double mass, double f_min, double tensions[8]) {
  return Guard([&] {
    Require(g != nullptr && pose != nullptr && tensions != nullptr, "null argument");
    Require(f_min >= 0.0, "f_min must be >= 0");
    cdpr::StaticsConfig cfg;
    cfg.f_min = f_min;
    Out(cdpr::GravityCompensation(g->g, PoseIn(pose), Inertia(mass), cfg).tensions,
        tensions);
  });
}

cdpr_status cdpr_passive_orientation(const cdpr_geometry* g, const double qt[3],
                                     const double tensions[8], double mass,
                                     double orientation[3], double* torque_residual) {
  return Guard([&] {
    Require(g != nullptr && qt != nullptr && tensions != nullptr && orientation != nullptr,
            "null argument");
    const cdpr::Equilibrium eq =
        cdpr::PassiveOrientation(g->g, In<3>(qt), In<8>(tensions), Inertia(mass));
    Out(eq.orientation.AsVector(), orientation);
    if (torque_residual != nullptr) *torque_residual = eq.torque_residual;
  });
}

cdpr_status cdpr_inject_noise(const double lengths[8], double sigma, uint64_t seed,
                              double out[8]) {
  return Guard([&] {
    Require(lengths != nullptr && out != nullptr, "null argument");
    Out(cdpr::InjectNoise(In<8>(lengths), sigma, seed), out);
  });
}

// ---- haptics ----------------------------------------------------------

cdpr_status cdpr_wall_value(const cdpr_wall* w, const double qt[3], double* out) {
  return Guard([&] {
    Require(w != nullptr && qt != nullptr && out != nullptr, "null argument");
    *out = cdpr::WallValue(WallIn(w), In<3>(qt));
  });
}

cdpr_status cdpr_repulsion_demand(const cdpr_wall* w, const double qt[3], double gain,
                                  double demand[6]) {
  return Guard([&] {
    Require(w != nullptr && qt != nullptr && demand != nullptr, "null argument");
    cdpr::HapticConfig cfg;
    cfg.gain = gain;
    cfg.Validate();
    Out(cdpr::RepulsionDemand(WallIn(w), In<3>(qt), cfg), demand);
  });
}

cdpr_status cdpr_ellipsoid_volume(const cdpr_wall* w, double* out) {
  return Guard([&] {
    Require(w != nullptr && out != nullptr, "null argument");
    *out = cdpr::EllipsoidVolume(WallIn(w));
  });
}

// ---- configuration ----------------------------------------------------

cdpr_status cdpr_config_default(cdpr_config** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    *out = new cdpr_config{cdpr::DefaultConfig()};
  });
}

cdpr_status cdpr_config_load(const char* path, cdpr_config** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    std::optional<std::filesystem::path> explicit_path;
    if (path != nullptr && *path) explicit_path = path;
    const auto resolved = cdpr::ResolveConfigPath(explicit_path);
    *out = new cdpr_config{resolved ? cdpr::LoadConfig(*resolved) : cdpr::DefaultConfig()};
  });
}

cdpr_status cdpr_config_from_json(const char* json, cdpr_config** out) {
  return Guard([&] {
    Require(json != nullptr && out != nullptr, "null argument");
    cdpr::Json j;
    try {
      j = cdpr::Json::parse(json);
    } catch (const cdpr::Json::exception& e) {
      throw Error(ErrorCode::kParseError, e.what());
    }
    *out = new cdpr_config{cdpr::ConfigFromJson(j)};
  });
}

cdpr_status cdpr_config_to_json(const cdpr_config* c, char** json) {
  return Guard([&] {
    Require(c != nullptr && json != nullptr, "null argument");
    *json = Dup(cdpr::ConfigToJson(c->cfg).dump(2));
  });
}

cdpr_status cdpr_config_wall(const cdpr_config* c, cdpr_wall* out) {
  return Guard([&] {
    Require(c != nullptr && out != nullptr, "null argument");
    WallOut(c->cfg.wall, out);
  });
}

cdpr_status cdpr_config_set_wall(cdpr_config* c, const cdpr_wall* w) {
  return Guard([&] {
    Require(c != nullptr && w != nullptr, "null argument");
    c->cfg.wall = WallIn(w);
  });
}

cdpr_status cdpr_config_statics(const cdpr_config* c, double* mass, double* f_min) {
  return Guard([&] {
    Require(c != nullptr && mass != nullptr && f_min != nullptr, "null argument");
    *mass = c->cfg.inertia.mass;
    *f_min = c->cfg.statics.f_min;
  });
}

cdpr_status cdpr_config_set_latency(cdpr_config* c, double min_s, double max_s) {
  return Guard([&] {
    Require(c != nullptr, "null argument");
    Require(min_s >= 0.0 && max_s >= min_s, "latency range must be 0 <= min <= max");
    c->cfg.sim.latency_min = min_s;
    c->cfg.sim.latency_max = max_s;
  });
}

void cdpr_config_free(cdpr_config* c) { delete c; }

// ---- session ----------------------------------------------------------

cdpr_status cdpr_session_new(double scale, const double initial_slave[3],
                             cdpr_session** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    cdpr::SessionConfig cfg;
    cfg.scale = scale;
    cfg.Validate();
    const cdpr::Vec3 slave =
        initial_slave != nullptr ? In<3>(initial_slave) : cdpr::Vec3::Zero();
    *out = new cdpr_session{cdpr::TeleopSession(cfg, slave)};
  });
}

cdpr_status cdpr_session_engage(cdpr_session* s, const double master_pose[6],
                                const cdpr_wall* wall, int override_wall) {
  return Guard([&] {
    Require(s != nullptr && master_pose != nullptr, "null argument");
    if (wall != nullptr) {
      const cdpr::VirtualWall w = WallIn(wall);
      s->session.Engage(PoseIn(master_pose), &w, override_wall != 0);
    } else {
      s->session.Engage(PoseIn(master_pose), nullptr, override_wall != 0);
    }
  });
}

cdpr_status cdpr_session_disengage(cdpr_session* s) {
  return Guard([&] {
    Require(s != nullptr, "null argument");
    s->session.Disengage();
  });
}

cdpr_status cdpr_session_engaged(const cdpr_session* s, int* out) {
  return Guard([&] {
    Require(s != nullptr && out != nullptr, "null argument");
    *out = s->session.state().clutch_engaged ? 1 : 0;
  });
}

cdpr_status cdpr_session_set_gimbal(cdpr_session* s, const double gimbal[5], int* clamps) {
  return Guard([&] {
    Require(s != nullptr && gimbal != nullptr, "null argument");
    const int n = s->session.SetGimbal(cdpr::GimbalState::FromVector(In<5>(gimbal)));
    if (clamps != nullptr) *clamps = n;
  });
}

cdpr_status cdpr_session_set_scale(cdpr_session* s, double scale,
                                   const double master_pose[6]) {
  return Guard([&] {
    Require(s != nullptr && master_pose != nullptr, "null argument");
    s->session.SetScale(scale, PoseIn(master_pose));
  });
}

cdpr_status cdpr_session_set_mode(cdpr_session* s, int mode) {
  return Guard([&] {
    Require(s != nullptr, "null argument");
    Require(mode == CDPR_MODE_POSITION || mode == CDPR_MODE_CURRENT, "unknown mode");
    s->session.SetMode(mode == CDPR_MODE_POSITION ? cdpr::ActuatorMode::kPosition
                                                  : cdpr::ActuatorMode::kCurrent);
  });
}

cdpr_status cdpr_session_update(cdpr_session* s, const double master_pose[6],
                                double xm[8], double xs[8]) {
  return Guard([&] {
    Require(s != nullptr && master_pose != nullptr, "null argument");
    const auto [m, sl] = s->session.Update(PoseIn(master_pose));
    if (xm != nullptr) Out(m.x, xm);
    if (xs != nullptr) Out(sl.x, xs);
  });
}

cdpr_status cdpr_session_last_slave(const cdpr_session* s, double xs[8]) {
  return Guard([&] {
    Require(s != nullptr && xs != nullptr, "null argument");
    Out(s->session.last_slave().x, xs);
  });
}

void cdpr_session_free(cdpr_session* s) { delete s; }

// ---- simulator --------------------------------------------------------

cdpr_status cdpr_sim_new(const cdpr_geometry* g, const cdpr_config* c, uint64_t seed,
                         cdpr_sim** out) {
  return Guard([&] {
    Require(g != nullptr && out != nullptr, "null argument");
    const cdpr::AppConfig cfg = c != nullptr ? c->cfg : cdpr::DefaultConfig();
    // Through the header, so a recording of this simulator replays exactly.
    *out = new cdpr_sim{
        cdpr::SimulatorFromHeader(cdpr::TrajectoryHeader(g->g, cfg, seed, 0))};
  });
}

cdpr_status cdpr_sim_header(const cdpr_sim* sim, int arm, char** json) {
  return Guard([&] {
    Require(sim != nullptr && json != nullptr, "null argument");
    *json = Dup(cdpr::TrajectoryHeader(sim->sim->geometry(), sim->sim->config(),
                                       sim->sim->seed(), arm)
                    .dump());
  });
}

cdpr_status cdpr_sim_step(cdpr_sim* sim, const char* inputs_json, char** tick_json) {
  return Guard([&] {
    Require(sim != nullptr, "null argument");
    std::vector<cdpr::OperatorInput> inputs;
    if (inputs_json != nullptr) {
      cdpr::Json j;
      try {
        j = cdpr::Json::parse(inputs_json);
      } catch (const cdpr::Json::exception& e) {
        throw Error(ErrorCode::kParseError, e.what());
      }
      if (!j.is_array()) throw Error(ErrorCode::kParseError, "inputs: expected an array");
      for (const auto& i : j) inputs.push_back(cdpr::InputFromJson(i));
    }
    const cdpr::SimState& s = sim->sim->Step(inputs);
    if (tick_json != nullptr) *tick_json = Dup(cdpr::TickToJson(inputs, s).dump());
  });
}

cdpr_status cdpr_sim_time(const cdpr_sim* sim, double* out) {
  return Guard([&] {
    Require(sim != nullptr && out != nullptr, "null argument");
    *out = sim->sim->state().time;
  });
}

void cdpr_sim_free(cdpr_sim* sim) { delete sim; }

cdpr_status cdpr_replay_file(const char* in_path, const char* out_path,
                             const uint64_t* seed_override, cdpr_replay_result* out) {
  return Guard([&] {
    Require(in_path != nullptr && out != nullptr, "null argument");
    const cdpr::TrajectoryFile file = cdpr::ReadTrajectory(std::filesystem::path(in_path));
    std::optional<std::uint64_t> seed;
    if (seed_override != nullptr) seed = *seed_override;
    const cdpr::ReplayResult r = cdpr::Replay(file, seed);
    if (out_path != nullptr) {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw Error(ErrorCode::kIoError, std::string("cannot write ") + out_path);
      f << r.output;
    }
    out->ticks = r.ticks;
    out->comparable = r.comparable ? 1 : 0;
    out->identical = r.identical ? 1 : 0;
    out->first_mismatch_line = r.first_mismatch_line;
  });
}

// ---- analysis tools ---------------------------------------------------

void cdpr_workspace_options_default(cdpr_workspace_options* out) {
  if (out == nullptr) return;
  const cdpr::SamplerSpec spec;
  out->monte_carlo = 0;
  out->count = spec.count;
  out->inner_fraction = spec.inner_fraction;
  out->seed = spec.seed;
  out->threads = spec.threads;
  out->threshold = 10.0 * cdpr::kDegToRad;
  out->mass = cdpr::PlatformInertia{}.mass;
  out->f_min = cdpr::StaticsConfig{}.f_min;
}

cdpr_status cdpr_workspace_analyze(const cdpr_geometry* g,
                                   const cdpr_workspace_options* opts,
                                   cdpr_workspace_summary* out, char** report,
                                   const char* samples_path) {
  return Guard([&] {
    Require(g != nullptr && out != nullptr, "null argument");
    cdpr_workspace_options o;
    cdpr_workspace_options_default(&o);
    if (opts != nullptr) o = *opts;
    Require(o.threshold > 0.0, "threshold must be positive");
    cdpr::SamplerSpec spec;
    spec.kind = o.monte_carlo ? cdpr::SamplerSpec::Kind::kMonteCarlo
                              : cdpr::SamplerSpec::Kind::kGrid;
    spec.count = o.count;
    spec.inner_fraction = o.inner_fraction;
    spec.seed = o.seed;
    spec.threads = o.threads;
    const cdpr::PlatformInertia inertia = Inertia(o.mass);
    cdpr::WrenchProbe probe;
    probe.statics.f_min = o.f_min;
    const cdpr::TensionVector tensions =
        cdpr::GravityCompensation(g->g, g->g.CenterPose(), inertia, probe.statics).tensions;
    const auto samples = cdpr::SampleWorkspace(g->g, tensions, inertia, spec, probe);
    const cdpr::WorkspaceReport r =
        cdpr::AnalyzeWorkspace(samples, cdpr::SampledBox(g->g, spec), o.threshold);
    out->samples = r.sample_count;
    out->feasible = r.feasible_count;
    out->fraction_within_10deg = cdpr::FractionWithin(samples, 10.0 * cdpr::kDegToRad);
    out->fraction_within_15deg = cdpr::FractionWithin(samples, 15.0 * cdpr::kDegToRad);
    out->inside_volume = r.inside_volume;
    out->total_volume = r.total_volume;
    WallOut(r.fitted, &out->fitted);
    if (report != nullptr) {
      std::ostringstream text;
      cdpr::WriteReport(text, r);
      *report = Dup(text.str());
    }
    if (samples_path != nullptr) {
      std::ofstream f(samples_path);
      if (!f) throw Error(ErrorCode::kIoError, std::string("cannot write ") + samples_path);
      cdpr::WriteSamples(f, samples);
    }
  });
}

void cdpr_fk_bench_options_default(cdpr_fk_bench_options* out) {
  if (out == nullptr) return;
  const cdpr::FkBenchSpec spec;
  out->trials = spec.trials;
  out->noise_sigma = spec.noise_sigma;
  out->seed = spec.seed;
}

cdpr_status cdpr_fk_bench(const cdpr_geometry* g, const cdpr_fk_bench_options* opts,
                          cdpr_fk_bench_summary* out, char** report) {
  return Guard([&] {
    Require(g != nullptr && out != nullptr, "null argument");
    cdpr::FkBenchSpec spec;
    if (opts != nullptr) {
      spec.trials = opts->trials;
      spec.noise_sigma = opts->noise_sigma;
      spec.seed = opts->seed;
    }
    const cdpr::FkBenchReport r =
        cdpr::RunFkBench(g->g, cdpr::FkConfig::ForGeometry(g->g), spec);
    out->trials = r.trials;
    out->converged = r.converged;
    out->median_error = r.ErrorPercentile(50.0);
    out->p90_error = r.ErrorPercentile(90.0);
    out->max_error = r.ErrorPercentile(100.0);
    out->fraction_below_4mm = r.FractionBelow(4e-3);
    out->median_iterations = r.MedianIterations();
    if (report != nullptr) {
      std::ostringstream text;
      cdpr::WriteFkBenchReport(text, spec, r);
      *report = Dup(text.str());
    }
  });
}

// ---- service ----------------------------------------------------------

void cdpr_service_options_default(cdpr_service_options* out) {
  if (out == nullptr) return;
  const cdpr::ServiceOptions d;
  out->bind_address = nullptr;
  out->port = d.port;
  out->arms = d.arms;
  out->seed = d.seed;
  out->record_prefix = nullptr;
  out->max_ticks = d.max_ticks;
  out->realtime = d.realtime ? 1 : 0;
}

cdpr_status cdpr_service_new(const cdpr_geometry* g, const cdpr_config* c,
                             const cdpr_service_options* opts, cdpr_service** out) {
  return Guard([&] {
    Require(g != nullptr && out != nullptr, "null argument");
    cdpr_service_options o;
    cdpr_service_options_default(&o);
    if (opts != nullptr) o = *opts;
    cdpr::ServiceOptions so;
    if (o.bind_address != nullptr) so.bind_address = o.bind_address;
    so.port = o.port;
    so.arms = o.arms;
    so.seed = o.seed;
    if (o.record_prefix != nullptr && *o.record_prefix) so.record_prefix = o.record_prefix;
    so.max_ticks = o.max_ticks;
    so.realtime = o.realtime != 0;
    const cdpr::AppConfig cfg = c != nullptr ? c->cfg : cdpr::DefaultConfig();
    *out = new cdpr_service{std::make_unique<cdpr::Service>(g->g, cfg, so)};
  });
}

cdpr_status cdpr_service_start(cdpr_service* s) {
  return Guard([&] {
    Require(s != nullptr, "null argument");
    s->service->Start();
  });
}

int cdpr_service_port(const cdpr_service* s) {
  return s != nullptr ? s->service->port() : 0;
}

int64_t cdpr_service_ticks(const cdpr_service* s) {
  return s != nullptr ? s->service->ticks() : 0;
}

cdpr_status cdpr_service_wait(cdpr_service* s) {
  return Guard([&] {
    Require(s != nullptr, "null argument");
    s->service->Wait();
  });
}

cdpr_status cdpr_service_stop(cdpr_service* s) {
  return Guard([&] {
    Require(s != nullptr, "null argument");
    s->service->Stop();
  });
}

void cdpr_service_free(cdpr_service* s) { delete s; }

}  // extern "C"
