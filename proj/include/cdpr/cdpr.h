/*
 * Copyright 2026 The cdpr-master Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libcdpr: kinematics, forward kinematics, statics, haptics,
 * teleoperation session, workspace analysis, simulator and service.
 *
 * Conventions
 *   - Every fallible call returns cdpr_status; CDPR_OK is 0. On failure the
 *     message is available from cdpr_last_error() on the same thread until
 *     the next failing call.
 *   - Poses are double[6] = {x, y, z, rx, ry, rz}: translation in m, XYZ
 *     Euler angles in rad. Cable arrays are double[8], index 0 is cable 1.
 *   - Matrices are row-major.
 *   - Strings returned through char** are owned by the caller and released
 *     with cdpr_free_string().
 *   - Handles are not thread-safe; distinct handles may be used from
 *     distinct threads.
 */
#ifndef CDPR_CDPR_H_
#define CDPR_CDPR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CDPR_API __declspec(dllexport)
#else
#define CDPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cdpr_status {
  CDPR_OK = 0,
  CDPR_ERR_INVALID_ARGUMENT = 1,
  CDPR_ERR_INDEX_OUT_OF_RANGE = 2,
  CDPR_ERR_DEGENERATE_CABLE = 3,
  CDPR_ERR_NON_POSITIVE_LENGTH = 4,
  CDPR_ERR_NOT_CONVERGED = 5,
  CDPR_ERR_INFEASIBLE = 6,
  CDPR_ERR_NO_EQUILIBRIUM = 7,
  CDPR_ERR_OUTSIDE_WALL = 8,
  CDPR_ERR_CLUTCH_DISENGAGED = 9,
  CDPR_ERR_AT_CENTER = 10,
  CDPR_ERR_TOO_FEW_MEMBERS = 11,
  CDPR_ERR_PARSE = 12,
  CDPR_ERR_IO = 13,
  CDPR_ERR_PORT_IN_USE = 14,
  CDPR_ERR_OUT_OF_MEMORY = 98,
  CDPR_ERR_INTERNAL = 99
} cdpr_status;

CDPR_API const char* cdpr_version(void);
CDPR_API const char* cdpr_status_string(cdpr_status status);
CDPR_API const char* cdpr_last_error(void);
CDPR_API void cdpr_free_string(char* s);

/* ---- geometry ---------------------------------------------------------- */

typedef struct cdpr_geometry cdpr_geometry;

CDPR_API cdpr_status cdpr_geometry_default(cdpr_geometry** out);
CDPR_API cdpr_status cdpr_geometry_load(const char* path, cdpr_geometry** out);
/* frame[i*3 + k], body[i*3 + k] for cable i, axis k. */
CDPR_API cdpr_status cdpr_geometry_from_anchors(const double frame[24],
                                                const double body[24],
                                                cdpr_geometry** out);
CDPR_API cdpr_status cdpr_geometry_anchors(const cdpr_geometry* g,
                                           double frame[24], double body[24]);
CDPR_API cdpr_status cdpr_geometry_save(const cdpr_geometry* g, const char* path);
CDPR_API cdpr_status cdpr_geometry_center(const cdpr_geometry* g, double center[3]);
CDPR_API void cdpr_geometry_free(cdpr_geometry* g);

/* ---- kinematics -------------------------------------------------------- */

CDPR_API cdpr_status cdpr_rotation_xyz(const double orientation[3], double r[9]);
CDPR_API cdpr_status cdpr_geodesic_angle(const double orientation[3], double* out);
/* cable is numbered 1..8. */
CDPR_API cdpr_status cdpr_cable_vector(const cdpr_geometry* g, const double pose[6],
                                       int cable, double out[3]);
CDPR_API cdpr_status cdpr_inverse_kinematics(const cdpr_geometry* g,
                                             const double pose[6],
                                             double lengths[8]);
/* dl/dq with Euler-rate columns, 8x6. */
CDPR_API cdpr_status cdpr_length_jacobian(const cdpr_geometry* g,
                                          const double pose[6], double j[48]);
/* Rows [u_i; (R B_i) x u_i] against the twist (v, omega), 8x6. */
CDPR_API cdpr_status cdpr_twist_jacobian(const cdpr_geometry* g,
                                         const double pose[6], double j[48]);

/* ---- forward kinematics ------------------------------------------------ */

typedef struct cdpr_fk_options {
  int max_iterations;
  double residual_tol;    /* m */
  double step_tol;        /* relative */
  double initial_damping;
} cdpr_fk_options;

typedef struct cdpr_fk_result {
  double pose[6];
  double residual; /* m */
  int iterations;
  int converged;
} cdpr_fk_result;

CDPR_API void cdpr_fk_options_default(cdpr_fk_options* out);
/* opts may be NULL for defaults. Bounds: frame box and +/-60 deg. */
CDPR_API cdpr_status cdpr_fk_solve(const cdpr_geometry* g, const double lengths[8],
                                   const double guess[6],
                                   const cdpr_fk_options* opts,
                                   cdpr_fk_result* out);

/* ---- statics ----------------------------------------------------------- */

/* Wrench is {fx, fy, fz, tx, ty, tz}: force in N, torque about q_t in N m. */
CDPR_API cdpr_status cdpr_wrench_from_tensions(const cdpr_geometry* g,
                                               const double pose[6],
                                               const double tensions[8],
                                               double wrench[6]);
/* Min-norm tensions >= f_min realizing the wrench; CDPR_ERR_INFEASIBLE when
 * none exists. residual may be NULL. */
CDPR_API cdpr_status cdpr_distribute_tensions(const cdpr_geometry* g,
                                              const double pose[6],
                                              const double wrench[6], double f_min,
                                              double tensions[8], double* residual);
CDPR_API cdpr_status cdpr_gravity_compensation(const cdpr_geometry* g,
                                               const double pose[6], double mass,
                                               double f_min, double tensions[8]);
CDPR_API cdpr_status cdpr_passive_orientation(const cdpr_geometry* g,
                                              const double qt[3],
                                              const double tensions[8], double mass,
                                              double orientation[3],
                                              double* torque_residual);
CDPR_API cdpr_status cdpr_inject_noise(const double lengths[8], double sigma,
                                       uint64_t seed, double out[8]);

/* ---- haptics ----------------------------------------------------------- */

typedef struct cdpr_wall {
  double center[3];
  double radii[3];
  double orientation_threshold; /* rad */
} cdpr_wall;

CDPR_API cdpr_status cdpr_wall_value(const cdpr_wall* w, const double qt[3],
                                     double* out);
/* {fx, fy, fz, 0, 0, 0}: zero inside, else `gain` toward the center. */
CDPR_API cdpr_status cdpr_repulsion_demand(const cdpr_wall* w, const double qt[3],
                                           double gain, double demand[6]);
CDPR_API cdpr_status cdpr_ellipsoid_volume(const cdpr_wall* w, double* out);

/* ---- configuration ----------------------------------------------------- */

typedef struct cdpr_config cdpr_config;

CDPR_API cdpr_status cdpr_config_default(cdpr_config** out);
/* path NULL or "" falls back to $CDPR_CONFIG, then to the defaults. */
CDPR_API cdpr_status cdpr_config_load(const char* path, cdpr_config** out);
CDPR_API cdpr_status cdpr_config_from_json(const char* json, cdpr_config** out);
CDPR_API cdpr_status cdpr_config_to_json(const cdpr_config* c, char** json);
CDPR_API cdpr_status cdpr_config_wall(const cdpr_config* c, cdpr_wall* out);
CDPR_API cdpr_status cdpr_config_set_wall(cdpr_config* c, const cdpr_wall* w);
CDPR_API cdpr_status cdpr_config_statics(const cdpr_config* c, double* mass,
                                         double* f_min);
/* Slave-command latency range, s. */
CDPR_API cdpr_status cdpr_config_set_latency(cdpr_config* c, double min_s,
                                             double max_s);
CDPR_API void cdpr_config_free(cdpr_config* c);

/* ---- teleoperation session ------------------------------------------- */

typedef struct cdpr_session cdpr_session;

enum { CDPR_MODE_POSITION = 0, CDPR_MODE_CURRENT = 1 };

/* Gimbal arrays are double[5] = {roll, pitch, yaw, trigger, knob}.
 * Task vectors X_m, X_s are double[8] = {x, y, z, roll, pitch, yaw, trigger,
 * knob}. */
CDPR_API cdpr_status cdpr_session_new(double scale, const double initial_slave[3],
                                      cdpr_session** out);
/* wall may be NULL to skip the inside-wall check. */
CDPR_API cdpr_status cdpr_session_engage(cdpr_session* s, const double master_pose[6],
                                         const cdpr_wall* wall, int override_wall);
CDPR_API cdpr_status cdpr_session_disengage(cdpr_session* s);
CDPR_API cdpr_status cdpr_session_engaged(const cdpr_session* s, int* out);
CDPR_API cdpr_status cdpr_session_set_gimbal(cdpr_session* s, const double gimbal[5],
                                             int* clamps);
CDPR_API cdpr_status cdpr_session_set_scale(cdpr_session* s, double scale,
                                            const double master_pose[6]);
CDPR_API cdpr_status cdpr_session_set_mode(cdpr_session* s, int mode);
/* CDPR_ERR_CLUTCH_DISENGAGED while disengaged. */
CDPR_API cdpr_status cdpr_session_update(cdpr_session* s, const double master_pose[6],
                                         double xm[8], double xs[8]);
CDPR_API cdpr_status cdpr_session_last_slave(const cdpr_session* s, double xs[8]);
CDPR_API void cdpr_session_free(cdpr_session* s);

/* ---- simulator --------------------------------------------------------- */

typedef struct cdpr_sim cdpr_sim;

CDPR_API cdpr_status cdpr_sim_new(const cdpr_geometry* g, const cdpr_config* c,
                                  uint64_t seed, cdpr_sim** out);
/* Trajectory header line (JSON) for this simulator. */
CDPR_API cdpr_status cdpr_sim_header(const cdpr_sim* sim, int arm, char** json);
/* inputs_json: JSON array of operator inputs (see docs/protocol.md) or NULL.
 * tick_json, if not NULL, receives the trajectory tick line. */
CDPR_API cdpr_status cdpr_sim_step(cdpr_sim* sim, const char* inputs_json,
                                   char** tick_json);
CDPR_API cdpr_status cdpr_sim_time(const cdpr_sim* sim, double* out);
CDPR_API void cdpr_sim_free(cdpr_sim* sim);

typedef struct cdpr_replay_result {
  size_t ticks;
  int comparable;             /* 0 when the seed was overridden */
  int identical;              /* regenerated file equals the input */
  size_t first_mismatch_line; /* 1-based, 0 if identical */
} cdpr_replay_result;

/* out_path and seed_override may be NULL. */
CDPR_API cdpr_status cdpr_replay_file(const char* in_path, const char* out_path,
                                      const uint64_t* seed_override,
                                      cdpr_replay_result* out);

/* ---- analysis tools ---------------------------------------------------- */

typedef struct cdpr_workspace_options {
  int monte_carlo;      /* 0 = regular grid */
  int count;            /* grid rounds up to the next cube */
  double inner_fraction;
  uint64_t seed;        /* Monte Carlo only */
  int threads;          /* 0 = hardware concurrency */
  double threshold;     /* rad */
  double mass;          /* kg */
  double f_min;         /* N */
} cdpr_workspace_options;

typedef struct cdpr_workspace_summary {
  size_t samples;
  size_t feasible;
  double fraction_within_10deg;
  double fraction_within_15deg;
  double inside_volume; /* m^3 */
  double total_volume;  /* m^3 */
  cdpr_wall fitted;
} cdpr_workspace_summary;

CDPR_API void cdpr_workspace_options_default(cdpr_workspace_options* out);
/* Tensions are gravity compensation at the frame center. report and
 * samples_path may be NULL. */
CDPR_API cdpr_status cdpr_workspace_analyze(const cdpr_geometry* g,
                                            const cdpr_workspace_options* opts,
                                            cdpr_workspace_summary* out,
                                            char** report,
                                            const char* samples_path);

typedef struct cdpr_fk_bench_options {
  int trials;
  double noise_sigma; /* m */
  uint64_t seed;
} cdpr_fk_bench_options;

typedef struct cdpr_fk_bench_summary {
  int trials;
  int converged;
  double median_error;  /* m */
  double p90_error;     /* m */
  double max_error;     /* m */
  double fraction_below_4mm;
  double median_iterations;
} cdpr_fk_bench_summary;

CDPR_API void cdpr_fk_bench_options_default(cdpr_fk_bench_options* out);
CDPR_API cdpr_status cdpr_fk_bench(const cdpr_geometry* g,
                                   const cdpr_fk_bench_options* opts,
                                   cdpr_fk_bench_summary* out, char** report);

/* ---- service ----------------------------------------------------------- */

typedef struct cdpr_service cdpr_service;

typedef struct cdpr_service_options {
  const char* bind_address; /* NULL = 127.0.0.1 */
  int port;                 /* 0 picks a free port */
  int arms;
  uint64_t seed;
  const char* record_prefix; /* NULL = no recording */
  int64_t max_ticks;         /* 0 = until stopped */
  int realtime;
} cdpr_service_options;

CDPR_API void cdpr_service_options_default(cdpr_service_options* out);
CDPR_API cdpr_status cdpr_service_new(const cdpr_geometry* g, const cdpr_config* c,
                                      const cdpr_service_options* opts,
                                      cdpr_service** out);
CDPR_API cdpr_status cdpr_service_start(cdpr_service* s);
CDPR_API int cdpr_service_port(const cdpr_service* s);
CDPR_API int64_t cdpr_service_ticks(const cdpr_service* s);
CDPR_API cdpr_status cdpr_service_wait(cdpr_service* s);
CDPR_API cdpr_status cdpr_service_stop(cdpr_service* s);
CDPR_API void cdpr_service_free(cdpr_service* s);

#ifdef __cplusplus
}
#endif

#endif /* CDPR_CDPR_H_ */
