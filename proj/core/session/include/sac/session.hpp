// Copyright 2026 The sacontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "sac/simulator.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sac {

inline constexpr int kProtocolVersion = 1;

struct SessionOptions {
  std::filesystem::path scenario;
  bool real_time = true;
  double snapshot_hz = 30.0;
  double staleness = 0.25;        // s, human force is zeroed after this
  double max_force = 100.0;       // N, per-vector norm clamp
  double max_torque = 10.0;       // N m
  std::size_t snapshot_decimation = 33;  // steps per snapshot at max pace
  std::size_t client_queue = 16;  // outbound snapshot frames per client
  std::optional<std::filesystem::path> trace_dir;
};

/// Protocol logic of one live session. Not thread-safe: owned by the
/// simulation task; transports feed it messages in receipt order.
class Session {
 public:
  using Clock = std::chrono::steady_clock;

  Session(ScenarioConfig cfg, SessionOptions opts);

  /// Applies one client message and returns the ack or error reply.
  /// Never throws for bad input.
  nlohmann::json handle(const std::string& text, Clock::time_point now);
  nlohmann::json handle(const nlohmann::json& msg, Clock::time_point now);

  /// One control step unless paused. Zeroes a stale human force first.
  void advance(Clock::time_point now);

  /// Current state; the transformed demo polyline is included when
  /// `with_demo`.
  nlohmann::json snapshot(bool with_demo) const;

  bool paused() const { return paused_; }
  const Simulation& simulation() const { return *sim_; }
  std::uint64_t demo_revision() const { return demo_revision_; }
  const HumanInput& human() const { return human_; }
  const std::vector<TraceRecord>& records() const { return records_; }
  /// Writes the recorded trace to trace_dir (no-op without one).
  void save_trace();

 private:
  nlohmann::json apply(const nlohmann::json& msg, Clock::time_point now);
  void load(ScenarioConfig cfg);

  SessionOptions opts_;
  std::filesystem::path scenario_dir_;
  std::optional<Simulation> sim_;
  std::vector<std::uint64_t> obstacle_ids_;
  std::uint64_t next_obstacle_id_ = 0;
  std::uint64_t demo_revision_ = 0;
  std::uint64_t sim_revision_seen_ = 0;
  HumanInput human_;
  std::optional<Clock::time_point> human_at_;
  bool paused_ = false;
  std::vector<TraceRecord> records_;
  std::size_t saved_traces_ = 0;
};

/// Clamps the force and torque halves of a wrench to the given norms.
Vec6 clamp_wrench(const Vec6& w, double max_force, double max_torque);

/// Websocket transport: one Session driven by a simulation thread, clients
/// served by a network thread. Endpoint: ws://host:port/session/{id}.
class SessionServer {
 public:
  /// `port` 0 picks an ephemeral port.
  SessionServer(ScenarioConfig cfg, SessionOptions opts, unsigned short port);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;
  void start();
  /// Stops both threads and writes the trace when trace_dir is set.
  void stop();
  /// Simulation steps taken so far.
  std::uint64_t steps() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs the websocket server until SIGINT/SIGTERM. Returns an exit code.
int serve(const SessionOptions& opts, unsigned short port);

}  // namespace sac
