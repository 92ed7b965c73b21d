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

// cdpr: command-line front end over the C API.
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cdpr/cdpr.h"

namespace {

struct GeometryDeleter {
  void operator()(cdpr_geometry* g) const { cdpr_geometry_free(g); }
};
struct ConfigDeleter {
  void operator()(cdpr_config* c) const { cdpr_config_free(c); }
};
struct ServiceDeleter {
  void operator()(cdpr_service* s) const { cdpr_service_free(s); }
};
using GeometryPtr = std::unique_ptr<cdpr_geometry, GeometryDeleter>;
using ConfigPtr = std::unique_ptr<cdpr_config, ConfigDeleter>;
using ServicePtr = std::unique_ptr<cdpr_service, ServiceDeleter>;

// Exit codes: 0 ok, 1 check failed (replay mismatch), 2 usage, 3 runtime error.
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

struct Failure {
  cdpr_status status;
};

void Check(cdpr_status st) {
  if (st != CDPR_OK) {
    std::fprintf(stderr, "cdpr: %s: %s\n", cdpr_status_string(st), cdpr_last_error());
    throw Failure{st};
  }
}

GeometryPtr LoadGeometry(const std::string& path) {
  cdpr_geometry* g = nullptr;
  Check(path.empty() ? cdpr_geometry_default(&g) : cdpr_geometry_load(path.c_str(), &g));
  return GeometryPtr(g);
}

ConfigPtr LoadConfig(const std::string& path) {
  cdpr_config* c = nullptr;
  Check(cdpr_config_load(path.c_str(), &c));
  return ConfigPtr(c);
}

void PrintString(char* s) {
  std::fputs(s, stdout);
  cdpr_free_string(s);
}

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void OnSignal(int) { g_interrupted = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cable-driven parallel robot teleoperation master: simulator and tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cdpr_version()));

  std::string geometry_path;
  std::string config_path;

  // serve
  auto* serve = app.add_subcommand("serve", "Run the headless simulation service");
  int port = 7070;
  std::string bind = "127.0.0.1";
  std::uint64_t seed = 1;
  std::vector<double> latency_ms;
  int arms = 2;
  std::string record_prefix;
  std::int64_t max_ticks = 0;
  bool fast = false;
  serve->add_option("-p,--port", port, "TCP port (0 picks a free one)")
      ->capture_default_str()->check(CLI::Range(0, 65535));
  serve->add_option("--bind", bind, "Listen address")->capture_default_str();
  serve->add_option("-g,--geometry", geometry_path, "Rig geometry JSON (default rig if omitted)")
      ->check(CLI::ExistingFile);
  serve->add_option("-c,--config", config_path,
                    "Config JSON (else $CDPR_CONFIG, else built-in defaults)");
  serve->add_option("-s,--seed", seed, "Seed for noise and latency")->capture_default_str();
  serve->add_option("--latency", latency_ms, "Slave-command latency range MIN MAX in ms")
      ->expected(2);
  serve->add_option("--arms", arms, "Number of arms")->capture_default_str()
      ->check(CLI::Range(1, 8));
  serve->add_option("--record", record_prefix, "Write <prefix>.arm<k>.jsonl trajectories");
  serve->add_option("--ticks", max_ticks, "Stop after this many ticks (0 = run until killed)")
      ->capture_default_str();
  serve->add_flag("--fast", fast, "Do not pace ticks to wall-clock time");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run a recorded trajectory and compare");
  std::string replay_in;
  std::string replay_out;
  std::uint64_t replay_seed = 0;
  replay->add_option("file", replay_in, "Recorded trajectory (.jsonl)")->required()
      ->check(CLI::ExistingFile);
  replay->add_option("-o,--out", replay_out, "Write the regenerated trajectory here");
  auto* replay_seed_opt =
      replay->add_option("--seed", replay_seed, "Override the recorded seed");

  // workspace
  auto* workspace = app.add_subcommand("workspace", "Zero-orientation workspace analysis");
  cdpr_workspace_options ws;
  cdpr_workspace_options_default(&ws);
  double threshold_deg = 10.0;
  bool monte_carlo = false;
  std::string samples_path;
  workspace->add_option("-g,--geometry", geometry_path, "Rig geometry JSON")
      ->check(CLI::ExistingFile);
  workspace->add_option("-c,--config", config_path,
                        "Config JSON for mass and f_min (else $CDPR_CONFIG)");
  workspace->add_option("-n,--count", ws.count, "Sample count (grid rounds up to a cube)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  workspace->add_flag("--monte-carlo", monte_carlo, "Uniform random samples instead of a grid");
  workspace->add_option("--inner-fraction", ws.inner_fraction,
                        "Sampled fraction of the frame box per axis")
      ->capture_default_str();
  workspace->add_option("-s,--seed", ws.seed, "Monte Carlo seed")->capture_default_str();
  workspace->add_option("-t,--threshold-deg", threshold_deg, "Wall membership threshold")
      ->capture_default_str();
  workspace->add_option("-j,--threads", ws.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  workspace->add_option("--samples", samples_path, "Write per-sample results here");

  // fk-bench
  auto* bench = app.add_subcommand("fk-bench", "Forward-kinematics accuracy under noise");
  cdpr_fk_bench_options fb;
  cdpr_fk_bench_options_default(&fb);
  double sigma_mm = fb.noise_sigma * 1e3;
  bench->add_option("-g,--geometry", geometry_path, "Rig geometry JSON")
      ->check(CLI::ExistingFile);
  bench->add_option("-n,--trials", fb.trials, "Number of trials")->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--sigma-mm", sigma_mm, "Per-cable noise std dev in mm")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  bench->add_option("-s,--seed", fb.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*serve) {
      GeometryPtr g = LoadGeometry(geometry_path);
      ConfigPtr c = LoadConfig(config_path);
      if (!latency_ms.empty()) {
        Check(cdpr_config_set_latency(c.get(), latency_ms[0] * 1e-3, latency_ms[1] * 1e-3));
      }
      cdpr_service_options so;
      cdpr_service_options_default(&so);
      so.bind_address = bind.c_str();
      so.port = port;
      so.arms = arms;
      so.seed = seed;
      so.record_prefix = record_prefix.empty() ? nullptr : record_prefix.c_str();
      so.max_ticks = max_ticks;
      so.realtime = fast ? 0 : 1;
      cdpr_service* raw = nullptr;
      Check(cdpr_service_new(g.get(), c.get(), &so, &raw));
      ServicePtr svc(raw);
      Check(cdpr_service_start(svc.get()));
      std::printf("listening on %s:%d\n", bind.c_str(), cdpr_service_port(svc.get()));
      std::fflush(stdout);
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      if (max_ticks > 0) {
        while (!g_interrupted && cdpr_service_ticks(svc.get()) < max_ticks) {
          struct timespec ts = {0, 20000000};
          nanosleep(&ts, nullptr);
        }
      } else {
        while (!g_interrupted) {
          struct timespec ts = {0, 50000000};
          nanosleep(&ts, nullptr);
        }
      }
      Check(cdpr_service_stop(svc.get()));
      std::printf("stopped after %lld ticks\n",
                  static_cast<long long>(cdpr_service_ticks(svc.get())));
      return 0;
    }

    if (*replay) {
      cdpr_replay_result r;
      const std::uint64_t* seed_ptr = replay_seed_opt->count() > 0 ? &replay_seed : nullptr;
      Check(cdpr_replay_file(replay_in.c_str(), replay_out.empty() ? nullptr : replay_out.c_str(),
                             seed_ptr, &r));
      std::printf("ticks: %zu\n", r.ticks);
      if (!r.comparable) {
        std::printf("comparable: false (seed overridden; output is not expected to match)\n");
        return 0;
      }
      if (r.identical) {
        std::printf("identical: true\n");
        return 0;
      }
      std::printf("identical: false\nfirst_mismatch_line: %zu\n", r.first_mismatch_line);
      return kExitMismatch;
    }

    if (*workspace) {
      GeometryPtr g = LoadGeometry(geometry_path);
      ConfigPtr c = LoadConfig(config_path);
      Check(cdpr_config_statics(c.get(), &ws.mass, &ws.f_min));
      ws.monte_carlo = monte_carlo ? 1 : 0;
      ws.threshold = threshold_deg * 3.14159265358979323846 / 180.0;
      cdpr_workspace_summary summary;
      char* report = nullptr;
      Check(cdpr_workspace_analyze(g.get(), &ws, &summary, &report,
                                   samples_path.empty() ? nullptr : samples_path.c_str()));
      PrintString(report);
      return 0;
    }

    if (*bench) {
      GeometryPtr g = LoadGeometry(geometry_path);
      fb.noise_sigma = sigma_mm * 1e-3;
      cdpr_fk_bench_summary summary;
      char* report = nullptr;
      Check(cdpr_fk_bench(g.get(), &fb, &summary, &report));
      PrintString(report);
      return 0;
    }
  } catch (const Failure&) {
    return kExitError;
  }
  return 0;
}
