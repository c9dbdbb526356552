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

// Client protocol: one JSON object per line (one per WebSocket text
// message). Field names and units are documented in docs/client-protocol.md.

#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "subsense/session.hpp"
#include "subsense/task.hpp"

namespace subsense::gateway {

/// Client request to change the snapshot rate for its connection.
struct SubscribeRequest {
  double rate_hz = 0.0;  // 0 = every tick
};

using ClientMessage = std::variant<InputMessage, SubscribeRequest>;

struct ParseError {
  std::string message;
};

/// Parses one client line. Malformed input yields ParseError, never throws.
std::variant<ClientMessage, ParseError> ParseClientMessage(const std::string& line);

nlohmann::json InputToJson(const InputMessage& msg);
/// Throws std::invalid_argument on malformed input.
InputMessage InputFromJson(const nlohmann::json& j);

nlohmann::json SnapshotToJson(const StateSnapshot& s);
nlohmann::json EventToJson(const plant::PlantEvent& e);
nlohmann::json MetricsToJson(const harness::TaskMetrics& m);
harness::TaskMetrics MetricsFromJson(const nlohmann::json& j);
nlohmann::json ErrorJson(const std::string& message);

const char* ToString(plant::DiscLocation loc);

}  // namespace subsense::gateway
