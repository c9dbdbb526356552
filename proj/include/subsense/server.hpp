// Copyright 2026 The SubSense Authors.
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

// Network front ends: the WebSocket gateway that streams snapshots to
// operator consoles, and the standalone UDP frame bridge.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "subsense/harness.hpp"
#include "subsense/scenario.hpp"
#include "subsense/wire.hpp"

namespace subsense::net {

struct GatewayOptions {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks an ephemeral port
  bool realtime = true;       // pace ticks to wall time; otherwise run flat out
  double limit_s = 0.0;       // 0 = scenario session limit
  bool stop_on_complete = false;
  std::ostream* record = nullptr;
  std::string operator_name = "live";
};

struct GatewayResult {
  harness::TaskMetrics metrics;
  std::uint64_t ticks = 0;
  std::uint64_t clients_served = 0;
};

/// WebSocket gateway. One tick thread owns the session; client I/O runs on a
/// separate Asio thread and exchanges data with it only through queues.
class Gateway {
 public:
  Gateway(Scenario scenario, GatewayOptions options);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and starts accepting connections. Throws on bind failure.
  void Start();
  /// Ticks until the limit, completion (if requested) or Stop().
  GatewayResult Run();
  /// Safe from any thread, including signal-driven callers.
  void Stop();

  std::uint16_t port() const;
  std::uint64_t ticks() const { return ticks_.load(); }
  std::size_t client_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<std::uint64_t> ticks_{0};
};

/// Snapshot decimation: a client asking for `rate_hz` gets every Nth tick.
std::uint64_t DecimationFor(double rate_hz, double tick_hz);

struct UdpBridgeOptions {
  std::string listen_address = "0.0.0.0";
  std::uint16_t listen_port = 14550;
  std::string forward_address = "127.0.0.1";
  std::uint16_t forward_port = 14551;
  double stats_interval_s = 0.0;  // 0 disables periodic stats
};

/// Receives datagrams, validates the frame and forwards good ones.
class UdpBridge {
 public:
  explicit UdpBridge(UdpBridgeOptions options, std::function<void(const wire::BridgeStats&)> on_stats = {});
  ~UdpBridge();

  void Start();
  void Run();
  void Stop();

  std::uint16_t listen_port() const;
  wire::BridgeStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace subsense::net
