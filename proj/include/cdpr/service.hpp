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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "cdpr/sim.hpp"

namespace cdpr {

inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

/// "<decimal length>\n<JSON>" with the compact JSON dump as the body.
std::string EncodeFrame(const Json& message);

/// Incremental frame splitter for one byte stream.
class FrameDecoder {
 public:
  void Feed(const char* data, std::size_t n);

  /// Next complete body, if any. After a framing error (bad length line or
  /// oversize frame) broken() is true and nothing more is returned.
  std::optional<std::string> Next();
  bool broken() const { return !error_.empty(); }
  const std::string& error() const { return error_; }

 private:
  std::string buffer_;
  std::string error_;
};

struct ServiceOptions {
  std::string bind_address = "127.0.0.1";
  int port = 0;                 // 0 picks a free port
  int arms = 2;
  std::uint64_t seed = 1;       // arm k uses seed + k
  std::optional<std::filesystem::path> record_prefix;  // <prefix>.arm<k>.jsonl
  std::int64_t max_ticks = 0;   // 0 runs until Stop()
  bool realtime = true;         // pace ticks at dt; false runs flat out
};

/// Headless simulation service: one simulation thread steps every arm in
/// lockstep, one I/O thread serves clients. They share only ordered queues.
class Service {
 public:
  Service(CdprGeometry g, AppConfig cfg, ServiceOptions opts);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts both threads. Throws kPortInUse or kIoError.
  void Start();
  int port() const;
  std::int64_t ticks() const;

  /// Blocks until max_ticks is reached or Stop() is called.
  void Wait();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cdpr
