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
#include "cdpr/service.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "cdpr/error.hpp"

namespace cdpr {
namespace {

// Broadcasts are dropped for a client whose unsent backlog exceeds this.
constexpr std::size_t kMaxBacklog = 8u << 20;

void SetNonBlocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

std::string Errno(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

Json Nack(const Json& seq, const std::string& reason) {
  return {{"type", "nack"}, {"seq", seq}, {"reason", reason}};
}

}  // namespace

std::string EncodeFrame(const Json& message) {
  const std::string body = message.dump();
  return std::to_string(body.size()) + "\n" + body;
}

void FrameDecoder::Feed(const char* data, std::size_t n) {
  if (!broken()) buffer_.append(data, n);
}

std::optional<std::string> FrameDecoder::Next() {
  if (broken()) return std::nullopt;
  const std::size_t nl = buffer_.find('\n');
  if (nl == std::string::npos) {
    if (buffer_.size() > 20) error_ = "length line too long";
    return std::nullopt;
  }
  const std::string len_text = buffer_.substr(0, nl);
  if (len_text.empty() || len_text.size() > 20 ||
      len_text.find_first_not_of("0123456789") != std::string::npos) {
    error_ = "bad length line '" + len_text.substr(0, 32) + "'";
    return std::nullopt;
  }
  const unsigned long long len = std::stoull(len_text);
  if (len > kMaxFrameBytes) {
    error_ = "frame of " + len_text + " bytes exceeds the 1 MiB limit";
    return std::nullopt;
  }
  if (buffer_.size() - nl - 1 < len) return std::nullopt;
  std::string body = buffer_.substr(nl + 1, len);
  buffer_.erase(0, nl + 1 + len);
  return body;
}

struct Service::Impl {
  struct Client {
    int fd = -1;
    FrameDecoder decoder;
    int arm = -1;
    std::optional<double> last_timestamp;
    bool closing = false;
  };

  struct Arm {
    Json header;
    std::unique_ptr<Simulator> sim;
    std::unique_ptr<TrajectoryWriter> writer;
    std::mutex mu;
    std::vector<OperatorInput> pending;  // guarded by mu
  };

  CdprGeometry g;
  AppConfig cfg;
  ServiceOptions opts;

  int listen_fd = -1;
  int wake[2] = {-1, -1};
  int bound_port = 0;
  std::vector<std::unique_ptr<Arm>> arms;

  std::mutex out_mu;                    // guards outbox and arm_fd
  std::map<int, std::string> outbox;
  std::vector<int> arm_fd;

  std::map<int, Client> clients;        // I/O thread only

  std::atomic<bool> stop{false};
  std::atomic<std::int64_t> ticks{0};
  std::mutex done_mu;
  std::condition_variable done_cv;
  bool sim_done = false;
  std::thread io_thread;
  std::thread sim_thread;
  bool started = false;

  void Wake() {
    const char b = 1;
    [[maybe_unused]] const auto n = write(wake[1], &b, 1);
  }

  void Send(int fd, const Json& msg) {
    std::lock_guard lock(out_mu);
    outbox[fd] += EncodeFrame(msg);
  }

  Json Snapshot(int arm) const {
    Json j;
    j["type"] = "config_snapshot";
    for (const auto& [key, value] : arms[arm]->header.items()) j[key] = value;
    return j;
  }

  void Push(int arm, const OperatorInput& in) {
    std::lock_guard lock(arms[arm]->mu);
    arms[arm]->pending.push_back(in);
  }

  void HandleMessage(Client& c, const std::string& body) {
    Json msg;
    try {
      msg = Json::parse(body);
    } catch (const Json::exception& e) {
      Send(c.fd, Nack(nullptr, std::string("malformed JSON: ") + e.what()));
      return;
    }
    const Json seq = msg.is_object() && msg.contains("seq") ? msg["seq"] : Json(nullptr);
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      Send(c.fd, Nack(seq, "message needs a string 'type'"));
      return;
    }
    const std::string type = msg["type"].get<std::string>();
    if (type == "hello") {
      if (c.arm >= 0) {
        Send(c.fd, Nack(seq, "hello already received"));
        return;
      }
      if (!msg.contains("arm") || !msg["arm"].is_number_integer()) {
        Send(c.fd, Nack(seq, "hello needs an integer 'arm'"));
        return;
      }
      const int arm = msg["arm"].get<int>();
      if (arm < 0 || arm >= static_cast<int>(arms.size())) {
        Send(c.fd, Nack(seq, "arm " + std::to_string(arm) + " does not exist"));
        return;
      }
      {
        std::lock_guard lock(out_mu);
        if (arm_fd[arm] >= 0) {
          outbox[c.fd] += EncodeFrame(Nack(seq, "arm " + std::to_string(arm) + " already has a client"));
          return;
        }
        arm_fd[arm] = c.fd;
      }
      c.arm = arm;
      Send(c.fd, Snapshot(arm));
    } else if (type == "get_config") {
      if (c.arm < 0) {
        Send(c.fd, Nack(seq, "send hello first"));
        return;
      }
      Send(c.fd, Snapshot(c.arm));
    } else if (type == "operator_input") {
      if (c.arm < 0) {
        Send(c.fd, Nack(seq, "send hello first"));
        return;
      }
      OperatorInput in;
      try {
        in = InputFromJson(msg);
      } catch (const Error& e) {
        Send(c.fd, Nack(seq, e.what()));
        return;
      }
      if (c.last_timestamp && in.timestamp < *c.last_timestamp) {
        Send(c.fd, Nack(seq, "timestamp went backwards"));
        return;
      }
      c.last_timestamp = in.timestamp;
      Push(c.arm, in);
      Send(c.fd, {{"type", "ack"}, {"seq", seq}});
    } else {
      Send(c.fd, Nack(seq, "unknown message type '" + type + "'"));
    }
  }

  void Disconnect(int fd) {
    auto it = clients.find(fd);
    if (it == clients.end()) return;
    const Client& c = it->second;
    if (c.arm >= 0) {
      // Losing the operator releases the pedal.
      OperatorInput release;
      release.timestamp = c.last_timestamp.value_or(0.0);
      release.pedal = false;
      Push(c.arm, release);
    }
    {
      std::lock_guard lock(out_mu);
      if (c.arm >= 0 && arm_fd[c.arm] == fd) arm_fd[c.arm] = -1;
      outbox.erase(fd);
    }
    close(fd);
    clients.erase(it);
  }

  void Flush(int fd) {
    std::lock_guard lock(out_mu);
    auto it = outbox.find(fd);
    if (it == outbox.end()) return;
    std::string& buf = it->second;
    while (!buf.empty()) {
      const ssize_t n = send(fd, buf.data(), buf.size(), MSG_NOSIGNAL);
      if (n <= 0) break;
      buf.erase(0, static_cast<std::size_t>(n));
    }
  }

  bool HasOutput(int fd) {
    std::lock_guard lock(out_mu);
    auto it = outbox.find(fd);
    return it != outbox.end() && !it->second.empty();
  }

  void IoLoop() {
    std::vector<pollfd> fds;
    char buf[65536];
    while (!stop.load()) {
      fds.clear();
      fds.push_back({listen_fd, POLLIN, 0});
      fds.push_back({wake[0], POLLIN, 0});
      for (const auto& [fd, c] : clients) {
        short events = POLLIN;
        if (HasOutput(fd)) events |= POLLOUT;
        fds.push_back({fd, events, 0});
      }
      if (poll(fds.data(), fds.size(), 100) < 0) {
        if (errno == EINTR) continue;
        break;
      }
      if (fds[1].revents & POLLIN) {
        while (read(wake[0], buf, sizeof(buf)) > 0) {
        }
      }
      if (fds[0].revents & POLLIN) {
        while (true) {
          const int fd = accept(listen_fd, nullptr, nullptr);
          if (fd < 0) break;
          SetNonBlocking(fd);
          clients[fd].fd = fd;
          std::lock_guard lock(out_mu);
          outbox[fd];
        }
      }
      std::vector<int> dead;
      for (std::size_t k = 2; k < fds.size(); ++k) {
        const int fd = fds[k].fd;
        auto it = clients.find(fd);
        if (it == clients.end()) continue;
        Client& c = it->second;
        bool gone = false;
        if (fds[k].revents & (POLLIN | POLLHUP | POLLERR)) {
          while (true) {
            const ssize_t n = recv(fd, buf, sizeof(buf), 0);
            if (n > 0) {
              c.decoder.Feed(buf, static_cast<std::size_t>(n));
              continue;
            }
            if (n == 0 || (errno != EAGAIN && errno != EWOULDBLOCK)) gone = true;
            break;
          }
          while (auto body = c.decoder.Next()) HandleMessage(c, *body);
          if (c.decoder.broken() && !c.closing) {
            Send(fd, Nack(nullptr, "framing error: " + c.decoder.error() +
                                       "; closing connection"));
            c.closing = true;
          }
        }
        Flush(fd);
        if (gone || (c.closing && !HasOutput(fd))) dead.push_back(fd);
      }
      for (int fd : dead) Disconnect(fd);
    }
    std::vector<int> all;
    for (const auto& [fd, c] : clients) all.push_back(fd);
    for (int fd : all) {
      Flush(fd);
      Disconnect(fd);
    }
  }

  void SimLoop() {
    const double dt = cfg.sim.dt;
    const int every = cfg.sim.broadcast_every;
    const auto start = std::chrono::steady_clock::now();
    for (std::int64_t tick = 1;
         !stop.load() && (opts.max_ticks <= 0 || tick <= opts.max_ticks); ++tick) {
      if (opts.realtime) {
        std::this_thread::sleep_until(
            start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(double(tick) * dt)));
      }
      bool sent = false;
      for (std::size_t k = 0; k < arms.size(); ++k) {
        Arm& arm = *arms[k];
        std::vector<OperatorInput> inputs;
        {
          std::lock_guard lock(arm.mu);
          inputs.swap(arm.pending);
        }
        const SimState& s = arm.sim->Step(inputs);
        if (arm.writer) arm.writer->WriteLine(TickToJson(inputs, s));
        if (tick % every == 0) {
          Json update;
          update["type"] = "state_update";
          update["arm"] = static_cast<int>(k);
          const Json state = StateToJson(s);
          for (const auto& [key, value] : state.items()) update[key] = value;
          const std::string frame = EncodeFrame(update);
          std::lock_guard lock(out_mu);
          if (arm_fd[k] >= 0) {
            std::string& box = outbox[arm_fd[k]];
            if (box.size() < kMaxBacklog) {
              box += frame;
              sent = true;
            }
          }
        }
      }
      ticks.store(tick);
      if (sent) Wake();
    }
    for (auto& arm : arms) {
      if (arm->writer) arm->writer->Flush();
    }
    {
      std::lock_guard lock(done_mu);
      sim_done = true;
    }
    done_cv.notify_all();
  }

  void Close() {
    if (listen_fd >= 0) close(listen_fd);
    if (wake[0] >= 0) close(wake[0]);
    if (wake[1] >= 0) close(wake[1]);
    listen_fd = wake[0] = wake[1] = -1;
  }
};

Service::Service(CdprGeometry g, AppConfig cfg, ServiceOptions opts)
    : impl_(std::make_unique<Impl>()) {
  if (opts.arms < 1 || opts.port < 0 || opts.port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "invalid service options");
  }
  g.Validate();
  cfg.Validate();
  impl_->g = std::move(g);
  impl_->cfg = std::move(cfg);
  impl_->opts = std::move(opts);
}

Service::~Service() { Stop(); }

void Service::Start() {
  Impl& s = *impl_;
  if (s.started) throw Error(ErrorCode::kInvalidArgument, "service already started");

  for (int k = 0; k < s.opts.arms; ++k) {
    auto arm = std::make_unique<Impl::Arm>();
    arm->header = TrajectoryHeader(s.g, s.cfg, s.opts.seed + k, k);
    arm->sim = SimulatorFromHeader(arm->header);
    if (s.opts.record_prefix) {
      const std::filesystem::path path =
          s.opts.record_prefix->string() + ".arm" + std::to_string(k) + ".jsonl";
      arm->writer = std::make_unique<TrajectoryWriter>(path);
      arm->writer->WriteLine(arm->header);
    }
    s.arms.push_back(std::move(arm));
  }
  s.arm_fd.assign(s.arms.size(), -1);

  s.listen_fd = socket(AF_INET, SOCK_STREAM, 0);
  if (s.listen_fd < 0) throw Error(ErrorCode::kIoError, Errno("socket"));
  const int one = 1;
  setsockopt(s.listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(s.opts.port));
  if (inet_pton(AF_INET, s.opts.bind_address.c_str(), &addr.sin_addr) != 1) {
    s.Close();
    throw Error(ErrorCode::kInvalidArgument, "bad bind address " + s.opts.bind_address);
  }
  if (bind(s.listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    const int err = errno;
    s.Close();
    if (err == EADDRINUSE) {
      throw Error(ErrorCode::kPortInUse,
                  "port " + std::to_string(s.opts.port) + " is in use");
    }
    errno = err;
    throw Error(ErrorCode::kIoError, Errno("bind"));
  }
  if (listen(s.listen_fd, 8) < 0) {
    s.Close();
    throw Error(ErrorCode::kIoError, Errno("listen"));
  }
  socklen_t len = sizeof(addr);
  getsockname(s.listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
  s.bound_port = ntohs(addr.sin_port);
  SetNonBlocking(s.listen_fd);
  if (pipe(s.wake) < 0) {
    s.Close();
    throw Error(ErrorCode::kIoError, Errno("pipe"));
  }
  SetNonBlocking(s.wake[0]);
  SetNonBlocking(s.wake[1]);

  s.started = true;
  s.io_thread = std::thread([&s] { s.IoLoop(); });
  s.sim_thread = std::thread([&s] { s.SimLoop(); });
}

int Service::port() const { return impl_->bound_port; }

std::int64_t Service::ticks() const { return impl_->ticks.load(); }

void Service::Wait() {
  Impl& s = *impl_;
  if (!s.started) return;
  std::unique_lock lock(s.done_mu);
  s.done_cv.wait(lock, [&s] { return s.sim_done; });
}

void Service::Stop() {
  Impl& s = *impl_;
  if (!s.started) return;
  s.stop.store(true);
  s.Wake();
  if (s.sim_thread.joinable()) s.sim_thread.join();
  if (s.io_thread.joinable()) s.io_thread.join();
  for (auto& arm : s.arms) arm->writer.reset();
  s.Close();
  s.started = false;
}

}  // namespace cdpr
